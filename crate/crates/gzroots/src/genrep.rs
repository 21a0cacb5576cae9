//! Matrix elements of `e_l`, `f_l`, `k_l` in the primitive Gelfand-Zetlin
//! basis, with exact cancellation of vanishing brackets at roots of unity,
//! and the asymmetric flat convention for sl(3).
//!
//! A bracket `[n]` with `n` a nonzero multiple of `m` vanishes at the root
//! but not in a neighbourhood of it. Matrix elements are read off as the
//! limit `q -> root` along the unit circle: each vanishing factor is
//! replaced by its first-order slope, and the element is finite exactly when
//! the numerator vanishes to at least the order of the denominator.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::atypical::RotationRecord;
use crate::gzbasis::{cartan_exponent, enumerate_basis, validate_pattern, GZPattern, ModuleBasis, TopRow};
use crate::qarith::{epsilon, q_bracket, BracketValue, Leading, LimitValue, QPoint, UnityOrder};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Lower,
    Raise,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Lower => "lower",
            Direction::Raise => "raise",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenRepError {
    #[error("matrix element of the {direction} operator at level {l}, index {j} on {pattern} is divergent")]
    DivergentElement {
        pattern: GZPattern,
        j: usize,
        l: usize,
        direction: Direction,
    },
    #[error("top row {top:?} is not flat for m = {m}: need N = 3 and p_13 - p_33 = m + 1")]
    NotFlat { top: Vec<i64>, m: u32 },
    #[error("pattern {0} violates the betweenness conditions")]
    InvalidPattern(GZPattern),
}

/// Which formula family produced a [`GeneratorSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    Generic,
    FlatSl3,
    ModifiedSl3,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Generic => "generic",
            Convention::FlatSl3 => "flat_sl3",
            Convention::ModifiedSl3 => "modified_sl3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "generic" => Some(Convention::Generic),
            "flat_sl3" => Some(Convention::FlatSl3),
            "modified_sl3" => Some(Convention::ModifiedSl3),
            _ => None,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Product of bracket factors, with vanishing factors counted but excluded
/// from `value`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorProduct {
    pub factors: Vec<BracketValue>,
    pub value: f64,
    pub zeros: usize,
}

impl FactorProduct {
    fn new(args: &[i64], q: &QPoint) -> Self {
        let factors: Vec<BracketValue> = args.iter().map(|&n| q_bracket(n, q)).collect();
        let value = factors
            .iter()
            .filter(|b| !b.exactly_zero)
            .map(|b| b.value)
            .product();
        let zeros = factors.iter().filter(|b| b.exactly_zero).count();
        Self {
            factors,
            value,
            zeros,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PFactors {
    pub j: usize,
    pub l: usize,
    pub p1: FactorProduct,
    pub p2: FactorProduct,
    pub p3: FactorProduct,
    pub eta: usize,
    pub eta_prime: usize,
}

/// Bracket arguments under the three square-root products of the lowering
/// coefficient for `p_{jl} -> p_{jl} - 1`.
pub fn lowering_arguments(p: &GZPattern, j: usize, l: usize) -> [Vec<i64>; 3] {
    let pjl = p.entry(j, l);
    let first = (1..=l + 1)
        .map(|i| epsilon(i, j) * (p.entry(i, l + 1) - pjl + 1))
        .collect();
    let second = (1..l)
        .map(|i| epsilon(j, i) * (pjl - p.entry(i, l - 1)))
        .collect();
    let third = (1..=l)
        .filter(|&i| i != j)
        .flat_map(|i| {
            let d = p.entry(i, l) - pjl;
            [epsilon(i, j) * d, epsilon(i, j) * (d + 1)]
        })
        .collect();
    [first, second, third]
}

pub fn p_factors(j: usize, l: usize, p: &GZPattern, q: &QPoint) -> PFactors {
    assert!(1 <= j && j <= l && l < p.rank(), "need 1 <= j <= l <= N-1");
    let [a1, a2, a3] = lowering_arguments(p, j, l);
    let (p1, p2, p3) = (
        FactorProduct::new(&a1, q),
        FactorProduct::new(&a2, q),
        FactorProduct::new(&a3, q),
    );
    PFactors {
        j,
        l,
        eta: p1.zeros + p2.zeros,
        eta_prime: p3.zeros,
        p1,
        p2,
        p3,
    }
}

/// Limit of `sqrt(prod [num]) * prod [outer] / sqrt(prod [den])`, each
/// square root taken factor by factor.
pub fn bracket_ratio_limit(num: &[i64], den: &[i64], outer: &[i64], q: &QPoint) -> LimitValue {
    if num.contains(&0) || outer.contains(&0) {
        return LimitValue::Finite(Complex64::new(0.0, 0.0));
    }
    if den.contains(&0) {
        return LimitValue::Divergent { half_order: i32::MIN };
    }
    let mut acc = Leading::one();
    for &n in num {
        acc = acc.mul(Leading::bracket(n, q).sqrt());
    }
    for &n in outer {
        acc = acc.mul(Leading::bracket(n, q));
    }
    for &n in den {
        acc = acc.div(Leading::bracket(n, q).sqrt());
    }
    acc.limit()
}

/// Coefficient of `f_l` from `p` onto `p - delta_{jl}`.
pub fn lowering_limit(p: &GZPattern, j: usize, l: usize, q: &QPoint) -> LimitValue {
    let [a1, a2, a3] = lowering_arguments(p, j, l);
    let num: Vec<i64> = a1.into_iter().chain(a2).collect();
    bracket_ratio_limit(&num, &a3, &[], q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderTerm {
    pub source: GZPattern,
    pub target: GZPattern,
    pub coefficient: Complex64,
}

/// Nonzero terms of `f_l |p>` (lower) or `e_l |p>` (raise).
///
/// The raising coefficient onto `p + delta_{jl}` is the lowering coefficient
/// evaluated at `p + delta_{jl}`, which makes `e_l` the transpose of `f_l`.
pub fn ladder_action(
    p: &GZPattern,
    l: usize,
    direction: Direction,
    q: &QPoint,
) -> Result<Vec<LadderTerm>, GenRepError> {
    if !validate_pattern(p) {
        return Err(GenRepError::InvalidPattern(p.clone()));
    }
    let mut terms = Vec::new();
    for j in 1..=l {
        let (target, limit) = match direction {
            Direction::Lower => (p.shifted(j, l, -1), lowering_limit(p, j, l, q)),
            Direction::Raise => {
                let t = p.shifted(j, l, 1);
                let lim = lowering_limit(&t, j, l, q);
                (t, lim)
            }
        };
        let coefficient = match limit {
            LimitValue::Finite(c) => c,
            LimitValue::Divergent { .. } => {
                return Err(GenRepError::DivergentElement {
                    pattern: p.clone(),
                    j,
                    l,
                    direction,
                })
            }
        };
        if coefficient == Complex64::new(0.0, 0.0) {
            continue;
        }
        assert!(
            validate_pattern(&target),
            "nonzero coefficient onto invalid pattern {target}"
        );
        terms.push(LadderTerm {
            source: p.clone(),
            target,
            coefficient,
        });
    }
    Ok(terms)
}

/// Sparse `e_l`, `f_l` and diagonal `k_l` exponents over a module basis.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub basis: ModuleBasis,
    pub q: QPoint,
    pub convention: Convention,
    /// `e[l - 1]` is `e_l`.
    pub e: Vec<SparseMatrix>,
    pub f: Vec<SparseMatrix>,
    /// `k_exponents[l - 1][s]` is the power of q by which `k_l` acts on state `s`.
    pub k_exponents: Vec<Vec<i64>>,
    /// Rotated pairs when the basis was modified.
    pub rotation: Option<RotationRecord>,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of simple roots, `N - 1`.
    pub fn levels(&self) -> usize {
        self.e.len()
    }

    pub fn k_diagonal(&self, l: usize) -> Vec<Complex64> {
        self.k_exponents[l - 1].iter().map(|&h| self.q.pow(h)).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.e.iter().chain(&self.f).all(SparseMatrix::all_finite)
    }
}

pub(crate) fn k_exponent_table(basis: &ModuleBasis) -> Vec<Vec<i64>> {
    (1..basis.rank())
        .map(|l| basis.states().iter().map(|p| cartan_exponent(p, l)).collect())
        .collect()
}

pub fn build_generic_rep(top: &TopRow, q: &QPoint) -> Result<GeneratorSet, GenRepError> {
    let basis = enumerate_basis(top);
    let n = basis.len();
    let levels = top.rank() - 1;
    let mut e = vec![SparseMatrix::zeros(n); levels];
    let mut f = vec![SparseMatrix::zeros(n); levels];
    for (src, p) in basis.states().iter().enumerate() {
        for l in 1..=levels {
            for t in ladder_action(p, l, Direction::Lower, q)? {
                let dst = basis.index_of(&t.target).expect("target is a basis state");
                f[l - 1].set(dst, src, t.coefficient);
            }
            for t in ladder_action(p, l, Direction::Raise, q)? {
                let dst = basis.index_of(&t.target).expect("target is a basis state");
                e[l - 1].set(dst, src, t.coefficient);
            }
        }
    }
    Ok(GeneratorSet {
        k_exponents: k_exponent_table(&basis),
        basis,
        q: *q,
        convention: Convention::Generic,
        e,
        f,
        rotation: None,
    })
}

struct FlatTerm {
    level: usize,
    entry: usize,
    shift: i64,
    num: Vec<i64>,
    den: Vec<i64>,
    outer: Vec<i64>,
}

fn flat_terms(p: &GZPattern) -> Vec<FlatTerm> {
    let (p13, p23, p33) = (p.entry(1, 3), p.entry(2, 3), p.entry(3, 3));
    let (p12, p22, p11) = (p.entry(1, 2), p.entry(2, 2), p.entry(1, 1));
    let d = p12 - p22;
    vec![
        FlatTerm {
            level: 1,
            entry: 1,
            shift: -1,
            num: vec![p11 - p22 - 1],
            den: vec![],
            outer: vec![],
        },
        FlatTerm {
            level: 2,
            entry: 1,
            shift: -1,
            num: vec![p13 - p12 + 1, p12 - p23 - 1, p12 - p33 - 1],
            den: vec![d - 1, d],
            outer: vec![p12 - p11],
        },
        FlatTerm {
            level: 2,
            entry: 2,
            shift: -1,
            num: vec![p13 - p22 + 1, p23 - p22 + 1, p11 - p22],
            den: vec![d + 1, d],
            outer: vec![p22 - p33 - 1],
        },
        FlatTerm {
            level: 1,
            entry: 1,
            shift: 1,
            num: vec![p11 - p22],
            den: vec![],
            outer: vec![p12 - p11],
        },
        FlatTerm {
            level: 2,
            entry: 1,
            shift: 1,
            num: vec![p13 - p12, p12 - p23, p12 - p33],
            den: vec![d + 1, d],
            outer: vec![],
        },
        FlatTerm {
            level: 2,
            entry: 2,
            shift: 1,
            num: vec![p13 - p22, p23 - p22, p11 - p22 - 1],
            den: vec![d - 1, d],
            outer: vec![],
        },
    ]
}

/// Flat sl(3) representation with `p_13 - p_33 = m + 1`, using the
/// asymmetric coefficients in which `f_1` carries `[p11-p22-1]^(1/2)` and
/// `e_1` carries `[p12-p11] [p11-p22]^(1/2)`.
pub fn build_flat_sl3(top: &TopRow, m: UnityOrder) -> Result<GeneratorSet, GenRepError> {
    if top.rank() != 3 || top.span() != m.as_i64() + 1 {
        return Err(GenRepError::NotFlat {
            top: top.values().to_vec(),
            m: m.get(),
        });
    }
    let q = QPoint::root_of_unity(m);
    let basis = enumerate_basis(top);
    let n = basis.len();
    let mut e = vec![SparseMatrix::zeros(n); 2];
    let mut f = vec![SparseMatrix::zeros(n); 2];
    for (src, p) in basis.states().iter().enumerate() {
        for term in flat_terms(p) {
            let value = match bracket_ratio_limit(&term.num, &term.den, &term.outer, &q) {
                LimitValue::Finite(v) => v,
                LimitValue::Divergent { .. } => {
                    return Err(GenRepError::DivergentElement {
                        pattern: p.clone(),
                        j: term.entry,
                        l: term.level,
                        direction: if term.shift < 0 {
                            Direction::Lower
                        } else {
                            Direction::Raise
                        },
                    })
                }
            };
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            let target = p.shifted(term.entry, term.level, term.shift);
            let dst = basis
                .index_of(&target)
                .unwrap_or_else(|| panic!("nonzero flat coefficient onto invalid pattern {target}"));
            let slot = if term.shift < 0 { &mut f } else { &mut e };
            slot[term.level - 1].set(dst, src, value);
        }
    }
    Ok(GeneratorSet {
        k_exponents: k_exponent_table(&basis),
        basis,
        q,
        convention: Convention::FlatSl3,
        e,
        f,
        rotation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pat(s: &str) -> GZPattern {
        s.parse().unwrap()
    }

    fn m(k: u32) -> UnityOrder {
        UnityOrder::new(k).unwrap()
    }

    fn top(v: &[i64]) -> TopRow {
        TopRow::new(v.to_vec()).unwrap()
    }

    #[test]
    fn p_factor_zero_counts() {
        let q = QPoint::root_of_unity(m(3));
        let pf = p_factors(1, 2, &pat("[[4,2,0],[3,2],[3]]"), &q);
        assert_eq!((pf.eta, pf.eta_prime), (2, 1));
        let args = lowering_arguments(&pat("[[4,2,0],[3,2],[3]]"), 1, 2);
        assert!(args[0].contains(&0) && args[1].contains(&0));
        assert_eq!(args[2], vec![1, 0]);
    }

    #[test]
    fn p_factor_products_at_generic_q() {
        let q = QPoint::generic(0.37).unwrap();
        let pf = p_factors(1, 1, &pat("[[3,1,0],[3,1],[3]]"), &q);
        assert_eq!(pf.p1.factors.iter().map(|b| b.n).collect::<Vec<_>>(), vec![1, 1]);
        assert!((pf.p1.value - 1.0).abs() < 1e-15);
        assert!(pf.p2.factors.is_empty() && pf.p3.factors.is_empty());
        assert_eq!((pf.p2.value, pf.p3.value), (1.0, 1.0));
    }

    #[test]
    fn ladder_examples() {
        let g = QPoint::generic(0.37).unwrap();
        let t = ladder_action(&pat("[[3,1,0],[3,1],[3]]"), 1, Direction::Lower, &g).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].target, pat("[[3,1,0],[3,1],[2]]"));
        assert!((t[0].coefficient - 1.0).norm() < 1e-15);

        let q3 = QPoint::root_of_unity(m(3));
        let trivial = pat("[[4,2,0],[3,2],[3]]");
        assert!(ladder_action(&trivial, 2, Direction::Lower, &q3)
            .unwrap()
            .is_empty());

        let err = ladder_action(&pat("[[5,2,0],[5,2],[3]]"), 2, Direction::Lower, &q3).unwrap_err();
        assert!(matches!(err, GenRepError::DivergentElement { l: 2, .. }));
    }

    #[test]
    fn generic_rep_is_symmetric_and_finite() {
        let g = QPoint::generic(0.37).unwrap();
        let set = build_generic_rep(&top(&[5, 3, 0]), &g).unwrap();
        assert_eq!(set.dim(), 15);
        assert!(set.all_finite());
        for l in 0..2 {
            assert_eq!(set.e[l], set.f[l].transpose());
        }
    }

    #[test]
    fn generic_rep_diverges_on_atypical_top() {
        let q3 = QPoint::root_of_unity(m(3));
        assert!(matches!(
            build_generic_rep(&top(&[5, 2, 0]), &q3),
            Err(GenRepError::DivergentElement { .. })
        ));
    }

    #[test]
    fn flat_rep_annihilates_trivial_state() {
        let set = build_flat_sl3(&top(&[4, 2, 0]), m(3)).unwrap();
        assert_eq!(set.dim(), 8);
        let s = set.basis.index_of(&pat("[[4,2,0],[3,2],[3]]")).unwrap();
        for mat in set.e.iter().chain(&set.f) {
            assert!(mat.column(s).is_empty());
        }
        assert_eq!((set.k_exponents[0][s], set.k_exponents[1][s]), (0, 0));
    }

    #[test]
    fn flat_requires_span_m_plus_one() {
        assert!(matches!(
            build_flat_sl3(&top(&[5, 2, 0]), m(3)),
            Err(GenRepError::NotFlat { .. })
        ));
        assert!(build_flat_sl3(&top(&[6, 2, 0]), m(5)).is_ok());
    }

    fn small_pattern() -> impl Strategy<Value = GZPattern> {
        (3usize..=4, proptest::collection::vec(1i64..=3, 3), any::<proptest::sample::Index>())
            .prop_map(|(n, gaps, pick)| {
                let mut v = vec![0i64];
                for g in gaps.into_iter().take(n - 1) {
                    v.push(v.last().unwrap() + g);
                }
                v.reverse();
                let b = enumerate_basis(&TopRow::new(v).unwrap());
                b.state(pick.index(b.len())).clone()
            })
    }

    proptest! {
        #[test]
        fn eta_prime_bounded(p in small_pattern(), order in prop_oneof![Just(3u32), Just(5)]) {
            let q = QPoint::root_of_unity(m(order));
            for l in 1..p.rank() {
                for j in 1..=l {
                    prop_assert!(p_factors(j, l, &p, &q).eta_prime < l);
                }
            }
        }

        #[test]
        fn ladder_targets_differ_in_one_entry(p in small_pattern()) {
            let g = QPoint::generic(0.37).unwrap();
            for l in 1..p.rank() {
                for dir in [Direction::Lower, Direction::Raise] {
                    for t in ladder_action(&p, l, dir, &g).unwrap() {
                        let diff: Vec<i64> = t.target.flattened().iter()
                            .zip(p.flattened()).map(|(a, b)| a - b).filter(|d| *d != 0).collect();
                        prop_assert_eq!(diff.len(), 1);
                        prop_assert_eq!(diff[0].abs(), 1);
                        prop_assert!(validate_pattern(&t.target));
                    }
                }
            }
        }
    }
}
