//! Gelfand-Zetlin patterns: validation, module bases, the dimension formula
//! and the Cartan exponents carried by each basis state.
//!
//! Patterns are stored top-down. Entry `p(i, l)` is the `i`-th entry
//! (1-based) of level `l`, where level `N` is the top row and level 1 has a
//! single entry.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error("top row {0:?} is not strictly decreasing, so the module is empty")]
    EmptyModule(Vec<i64>),
    #[error("rank must be at least 2, got a top row of length {0}")]
    RankTooSmall(usize),
    #[error("pattern rows have lengths {0:?}; expected N, N-1, ..., 1")]
    BadShape(Vec<usize>),
    #[error("cannot parse pattern: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct GZPattern {
    rows: Vec<Vec<i64>>,
}

impl GZPattern {
    /// Checks the triangular shape only; see [`validate_pattern`] for the inequalities.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, BasisError> {
        let n = rows.len();
        let lens: Vec<usize> = rows.iter().map(Vec::len).collect();
        if n == 0 || lens.iter().enumerate().any(|(k, &len)| len != n - k) {
            return Err(BasisError::BadShape(lens));
        }
        Ok(Self { rows })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Row of level `l` (length `l`).
    pub fn row(&self, l: usize) -> &[i64] {
        &self.rows[self.rank() - l]
    }

    /// `p_{il}`, both indices 1-based.
    pub fn entry(&self, i: usize, l: usize) -> i64 {
        self.row(l)[i - 1]
    }

    pub fn row_sum(&self, l: usize) -> i64 {
        if l == 0 {
            0
        } else {
            self.row(l).iter().sum()
        }
    }

    pub fn top(&self) -> &[i64] {
        &self.rows[0]
    }

    /// Copy with `p_{jl}` moved by `delta`.
    pub fn shifted(&self, j: usize, l: usize, delta: i64) -> Self {
        let mut out = self.clone();
        let n = out.rank();
        out.rows[n - l][j - 1] += delta;
        out
    }

    /// Copy with level `l` replaced.
    pub fn with_row(&self, l: usize, row: &[i64]) -> Self {
        assert_eq!(row.len(), l, "row length must equal its level");
        let mut out = self.clone();
        let n = out.rank();
        out.rows[n - l] = row.to_vec();
        out
    }

    pub fn flattened(&self) -> Vec<i64> {
        self.rows.iter().flatten().copied().collect()
    }
}

impl TryFrom<Vec<Vec<i64>>> for GZPattern {
    type Error = BasisError;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, BasisError> {
        Self::from_rows(rows)
    }
}

impl From<GZPattern> for Vec<Vec<i64>> {
    fn from(p: GZPattern) -> Self {
        p.rows
    }
}

impl fmt::Display for GZPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, row) in self.rows.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (c, v) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl FromStr for GZPattern {
    type Err = BasisError;

    /// Parses the nested-row form `[[4,2,0],[3,2],[3]]`.
    fn from_str(s: &str) -> Result<Self, BasisError> {
        let rows: Vec<Vec<i64>> =
            serde_json::from_str(s).map_err(|e| BasisError::Parse(e.to_string()))?;
        Self::from_rows(rows)
    }
}

/// Highest-weight row of a module; strictly decreasing, length `N >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct TopRow {
    values: Vec<i64>,
}

impl TopRow {
    pub fn new(values: Vec<i64>) -> Result<Self, BasisError> {
        if values.len() < 2 {
            return Err(BasisError::RankTooSmall(values.len()));
        }
        if values.windows(2).any(|w| w[0] <= w[1]) {
            return Err(BasisError::EmptyModule(values));
        }
        Ok(Self { values })
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `p_{1N} - p_{NN}`.
    pub fn span(&self) -> i64 {
        self.values[0] - self.values[self.values.len() - 1]
    }
}

impl TryFrom<Vec<i64>> for TopRow {
    type Error = BasisError;
    fn try_from(values: Vec<i64>) -> Result<Self, BasisError> {
        Self::new(values)
    }
}

impl From<TopRow> for Vec<i64> {
    fn from(t: TopRow) -> Self {
        t.values
    }
}

/// All patterns with a given top row, in ascending lexicographic order of
/// their flattened rows.
#[derive(Debug, Clone)]
pub struct ModuleBasis {
    top: TopRow,
    states: Vec<GZPattern>,
    index: HashMap<GZPattern, usize>,
}

impl ModuleBasis {
    pub fn top(&self) -> &TopRow {
        &self.top
    }

    pub fn rank(&self) -> usize {
        self.top.rank()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[GZPattern] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &GZPattern {
        &self.states[k]
    }

    pub fn index_of(&self, p: &GZPattern) -> Option<usize> {
        self.index.get(p).copied()
    }
}

/// Whether every betweenness inequality `p_{i,l+1} >= p_{il} > p_{i+1,l+1}` holds.
pub fn validate_pattern(p: &GZPattern) -> bool {
    (1..p.rank()).all(|l| {
        let (upper, lower) = (p.row(l + 1), p.row(l));
        (0..l).all(|i| upper[i] >= lower[i] && lower[i] > upper[i + 1])
    })
}

pub fn enumerate_basis(top: &TopRow) -> ModuleBasis {
    fn extend(rows: &mut Vec<Vec<i64>>, out: &mut Vec<GZPattern>) {
        let last = rows.last().expect("at least the top row");
        if last.len() == 1 {
            out.push(GZPattern { rows: rows.clone() });
            return;
        }
        let bounds: Vec<(i64, i64)> = last.windows(2).map(|w| (w[1] + 1, w[0])).collect();
        let mut next: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        loop {
            rows.push(next.clone());
            extend(rows, out);
            rows.pop();
            // odometer over the box of admissible rows, last entry fastest
            let mut k = next.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if next[k] < bounds[k].1 {
                    next[k] += 1;
                    break;
                }
                next[k] = bounds[k].0;
            }
        }
    }

    let mut states = Vec::new();
    extend(&mut vec![top.values.clone()], &mut states);
    states.sort();
    let index = states
        .iter()
        .enumerate()
        .map(|(k, p)| (p.clone(), k))
        .collect();
    ModuleBasis {
        top: top.clone(),
        states,
        index,
    }
}

/// `prod_{i<j} (p_i - p_j) / prod_{i=1}^{N-1} (N-i)!` in exact integer arithmetic.
pub fn generic_dimension(top: &TopRow) -> u128 {
    let v = top.values();
    let n = v.len();
    let mut numerator: u128 = 1;
    let mut denominator: u128 = 1;
    for i in 0..n {
        for j in i + 1..n {
            let diff = u128::try_from(v[i] - v[j]).expect("strictly decreasing top row");
            numerator = numerator.checked_mul(diff).expect("dimension overflows u128");
            denominator *= (j - i) as u128;
        }
    }
    debug_assert_eq!(numerator % denominator, 0);
    numerator / denominator
}

/// Exponent `h` with `k_l |p> = q^h |p>`:
/// `2 sum_i p_{il} - sum_i p_{i,l+1} - sum_i p_{i,l-1} - 1`.
pub fn cartan_exponent(p: &GZPattern, l: usize) -> i64 {
    2 * p.row_sum(l) - p.row_sum(l + 1) - p.row_sum(l - 1) - 1
}

pub fn cartan_exponents(p: &GZPattern) -> Vec<i64> {
    (1..p.rank()).map(|l| cartan_exponent(p, l)).collect()
}

/// Multiplicity of each Cartan exponent vector across the basis.
pub fn weight_multiplicities(basis: &ModuleBasis) -> BTreeMap<Vec<i64>, usize> {
    let mut out = BTreeMap::new();
    for p in basis.states() {
        *out.entry(cartan_exponents(p)).or_insert(0) += 1;
    }
    out
}
