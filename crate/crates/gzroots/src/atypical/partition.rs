//! Type partitions of a pattern row, exchange maps between its blocks, and
//! the degenerate orbits they generate.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_complex::Complex64;

use super::AtypicalError;
use crate::genrep::lowering_limit;
use crate::gzbasis::{cartan_exponents, validate_pattern, GZPattern};
use crate::qarith::{LimitValue, QPoint, UnityOrder};

/// Consecutive blocks of row indices (1-based) whose entries agree modulo `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypePartition {
    pub level: usize,
    pub blocks: Vec<Vec<usize>>,
    /// Residue in `[0, m)` of `p_i - p_j` for `i` in block `k`, `j` in block `s`,
    /// keyed by `(k, s)` with `k < s` (0-based block positions).
    pub offsets: BTreeMap<(usize, usize), i64>,
    /// `(p_i - p_{i+1}) / m` for neighbours `i, i+1` sharing a block, keyed by `i`.
    pub multiples: BTreeMap<usize, i64>,
}

impl TypePartition {
    pub fn is_single_block(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Block position holding row index `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&i))
            .expect("index covered by the partition")
    }
}

pub fn classify_row_type(row: &[i64], m: UnityOrder) -> TypePartition {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut multiples = BTreeMap::new();
    for i in 1..=row.len() {
        let joins = i > 1 && m.divides(row[i - 2] - row[i - 1]);
        if joins {
            multiples.insert(i - 1, (row[i - 2] - row[i - 1]) / m.as_i64());
            blocks.last_mut().expect("previous block").push(i);
        } else {
            blocks.push(vec![i]);
        }
    }
    let mut offsets = BTreeMap::new();
    for k in 0..blocks.len() {
        for s in k + 1..blocks.len() {
            let d = row[blocks[k][0] - 1] - row[blocks[s][0] - 1];
            offsets.insert((k, s), d.rem_euclid(m.as_i64()));
        }
    }
    TypePartition {
        level: row.len(),
        blocks,
        offsets,
        multiples,
    }
}

/// Exchange with an explicit offset `zeta`: requires
/// `p_il - p_jl = zeta + b m` for an integer `b`, and moves
/// `p_il -> p_jl + b m = p_il - zeta`, `p_jl -> p_il - b m = p_jl + zeta`.
/// The result is not checked for validity.
pub fn exchange_map_with_offset(
    p: &GZPattern,
    l: usize,
    i: usize,
    j: usize,
    zeta: i64,
    m: UnityOrder,
) -> Result<GZPattern, AtypicalError> {
    if i == j || i == 0 || j == 0 || i > l || j > l {
        return Err(AtypicalError::BadIndices { i, j, l });
    }
    let (pi, pj) = (p.entry(i, l), p.entry(j, l));
    if m.divides(zeta) || !m.divides(pi - pj - zeta) {
        return Err(AtypicalError::NotDegenerate {
            row: p.row(l).to_vec(),
            i,
            j,
            m: m.get(),
        });
    }
    let mut row = p.row(l).to_vec();
    row[i - 1] = pi - zeta;
    row[j - 1] = pj + zeta;
    Ok(p.with_row(l, &row))
}

/// Exchange between entries `i < j` of row `l`, with `zeta` the residue of
/// `p_il - p_jl` in `[1, m)` and the remaining gap a multiple of `m`.
pub fn exchange_map(
    p: &GZPattern,
    l: usize,
    i: usize,
    j: usize,
    m: UnityOrder,
) -> Result<GZPattern, AtypicalError> {
    if i >= j || j > l {
        return Err(AtypicalError::BadIndices { i, j, l });
    }
    let zeta = (p.entry(i, l) - p.entry(j, l)).rem_euclid(m.as_i64());
    exchange_map_with_offset(p, l, i, j, zeta, m)
}

/// Row-`l` states reachable by exchange maps and completing to valid patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerateOrbit {
    pub level: usize,
    pub members: Vec<Vec<i64>>,
    pub partition: TypePartition,
}

impl DegenerateOrbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn orbit(p: &GZPattern, l: usize, m: UnityOrder) -> DegenerateOrbit {
    let weights = cartan_exponents(p);
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue = VecDeque::from([p.clone()]);
    seen.insert(p.row(l).to_vec());
    while let Some(cur) = queue.pop_front() {
        for i in 1..=l {
            for j in i + 1..=l {
                let Ok(next) = exchange_map(&cur, l, i, j, m) else {
                    continue;
                };
                if validate_pattern(&next) && seen.insert(next.row(l).to_vec()) {
                    assert_eq!(cartan_exponents(&next), weights, "exchange changed the weight");
                    queue.push_back(next);
                }
            }
        }
    }
    DegenerateOrbit {
        level: l,
        members: seen.into_iter().rev().collect(),
        partition: classify_row_type(p.row(l), m),
    }
}

/// Single aggregated coefficient `(sum_j c_j^2)^(1/2)` over the lowering
/// coefficients `c_j` of `f_l |p>`; `None` if any of them is divergent.
pub fn aggregated_coefficient(p: &GZPattern, l: usize, q: &QPoint) -> Option<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 1..=l {
        match lowering_limit(p, j, l, q) {
            LimitValue::Finite(c) => sum += c * c,
            LimitValue::Divergent { .. } => return None,
        }
    }
    Some(sum.sqrt())
}
