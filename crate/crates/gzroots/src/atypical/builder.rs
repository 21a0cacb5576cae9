//! sl(3) modules at roots of unity whose primitive `f_2` diverges.
//!
//! Every degenerate pair of row-2 states is rotated by the angle whose
//! `cos^2 = [g-1]/([2][g])`, `sin^2 = [g+1]/([2][g])`, with `g` the multiple
//! of `m` between their gaps. Both the primitive elements and the rotation
//! are expanded in `s = (q/q0 - 1)^(1/2)` and the rotated elements are read
//! off at `s = 0`. The orientation of each rotation is chosen by a
//! backtracking search so that all elements have a finite limit.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::sl3::detect_case_sl3;
use super::{AtypicalError, RotatedPair, RotationRecord};
use crate::genrep::{build_flat_sl3, k_exponent_table, lowering_arguments, Convention, GeneratorSet};
use crate::gzbasis::{enumerate_basis, validate_pattern, ModuleBasis, TopRow};
use crate::puiseux::{Series, DEFAULT_LEN};
use crate::qarith::{QPoint, UnityOrder};
use crate::sparse::SparseMatrix;

/// Default cap on orientation assignments tried by the search.
pub const DEFAULT_SIGN_BUDGET: u64 = 1 << 15;

const LIMIT_TOL: f64 = 1e-8;

/// Disjoint degenerate pairs of a rank-3 basis.
///
/// A state with row `(a, c)` and a multiple `g` of `m` below its gap pairs
/// with `(c + g, a - g)`, whose gap is mirrored around `g`. Candidates are
/// taken closest-first.
pub fn pair_candidates(basis: &ModuleBasis, m: UnityOrder) -> Vec<RotatedPair> {
    let mi = m.as_i64();
    let mut cands = Vec::new();
    for (up, p) in basis.states().iter().enumerate() {
        let (a, c) = (p.entry(1, 2), p.entry(2, 2));
        let d = a - c;
        let mut g = mi;
        while g < d {
            let partner = p.with_row(2, &[c + g, a - g]);
            if let Some(lo) = basis.index_of(&partner) {
                cands.push((d - g, lo, up, g));
            }
            g += mi;
        }
    }
    cands.sort_unstable();
    let mut used = vec![false; basis.len()];
    let mut pairs = Vec::new();
    for (_, lo, up, g) in cands {
        if used[lo] || used[up] {
            continue;
        }
        used[lo] = true;
        used[up] = true;
        pairs.push(RotatedPair {
            lower: lo,
            upper: up,
            center: g,
            orientation: 1,
        });
    }
    pairs
}

fn series_product(args: &[i64], q: &QPoint, invert: bool) -> Series {
    let mut acc = Series::constant(Complex64::new(1.0, 0.0), DEFAULT_LEN);
    for &n in args {
        let mut r = Series::bracket(n, q, DEFAULT_LEN).sqrt();
        if invert {
            r = r.inv();
        }
        acc = &acc * &r;
    }
    acc
}

/// Primitive `f_l` as series, keyed by `(target, source)`.
fn primitive_f(basis: &ModuleBasis, q: &QPoint) -> Vec<BTreeMap<(usize, usize), Series>> {
    (1..=2)
        .map(|l| {
            let mut out = BTreeMap::new();
            for (src, p) in basis.states().iter().enumerate() {
                for j in 1..=l {
                    let target = p.shifted(j, l, -1);
                    if !validate_pattern(&target) {
                        continue;
                    }
                    let [a1, a2, den] = lowering_arguments(p, j, l);
                    let num: Vec<i64> = a1.into_iter().chain(a2).collect();
                    assert!(
                        !num.contains(&0) && !den.contains(&0),
                        "identically vanishing bracket on a valid transition {p} -> {target}"
                    );
                    let dst = basis.index_of(&target).expect("valid target is a basis state");
                    let value = &series_product(&num, q, false) * &series_product(&den, q, true);
                    out.insert((dst, src), value);
                }
            }
            out
        })
        .collect()
}

/// A set of basis indices rotated together, with the columns of the
/// rotation restricted to it for either orientation.
struct Block {
    members: Vec<usize>,
    pair: Option<usize>,
    /// `columns[o][k]`: column of member `k` as `(row, entry)` for orientation `o` (0 is `+1`).
    columns: [Vec<Vec<(usize, Series)>>; 2],
}

fn rotation_series(center: i64, q: &QPoint) -> (Series, Series) {
    let shared = &Series::bracket(2, q, DEFAULT_LEN).sqrt() * &Series::bracket(center, q, DEFAULT_LEN).sqrt();
    let inv = shared.inv();
    let cos = &Series::bracket(center - 1, q, DEFAULT_LEN).sqrt() * &inv;
    let sin = &Series::bracket(center + 1, q, DEFAULT_LEN).sqrt() * &inv;
    (cos, sin)
}

fn blocks(n: usize, pairs: &[RotatedPair], q: &QPoint) -> Vec<Block> {
    let one = Series::constant(Complex64::new(1.0, 0.0), DEFAULT_LEN);
    let mut block_of = vec![usize::MAX; n];
    let mut out = Vec::new();
    for (k, pair) in pairs.iter().enumerate() {
        let (cos, sin) = rotation_series(pair.center, q);
        let (lo, up) = (pair.lower, pair.upper);
        let columns = [1.0, -1.0].map(|sign: f64| {
            let s = sin.scale(Complex64::new(sign, 0.0));
            vec![
                vec![(lo, cos.clone()), (up, -&s)],
                vec![(lo, s.clone()), (up, cos.clone())],
            ]
        });
        block_of[lo] = out.len();
        block_of[up] = out.len();
        out.push(Block {
            members: vec![lo, up],
            pair: Some(k),
            columns,
        });
    }
    for i in 0..n {
        if block_of[i] == usize::MAX {
            block_of[i] = out.len();
            let col = vec![vec![(i, one.clone())]];
            out.push(Block {
                members: vec![i],
                pair: None,
                columns: [col.clone(), col],
            });
        }
    }
    out
}

/// Rotated entries `(S^T F S)[a][b]` for `a` in block `x`, `b` in block `y`.
fn rotated_entries(
    f: &BTreeMap<(usize, usize), Series>,
    x: &Block,
    ox: usize,
    y: &Block,
    oy: usize,
) -> Vec<((usize, usize), Series)> {
    let mut out = Vec::new();
    for (ka, &a) in x.members.iter().enumerate() {
        for (kb, &b) in y.members.iter().enumerate() {
            let mut acc: Option<Series> = None;
            for (i, si) in &x.columns[ox][ka] {
                for (j, sj) in &y.columns[oy][kb] {
                    if let Some(v) = f.get(&(*i, *j)) {
                        let term = &(si * v) * sj;
                        acc = Some(match acc {
                            Some(s) => &s + &term,
                            None => term,
                        });
                    }
                }
            }
            if let Some(s) = acc {
                out.push(((a, b), s));
            }
        }
    }
    out
}

fn block_pair_finite(fs: &[BTreeMap<(usize, usize), Series>], x: &Block, ox: usize, y: &Block, oy: usize) -> bool {
    fs.iter()
        .all(|f| rotated_entries(f, x, ox, y, oy).iter().all(|(_, s)| s.limit(LIMIT_TOL).is_ok()))
}

fn orientations(b: &Block) -> &'static [usize] {
    if b.pair.is_some() {
        &[0, 1]
    } else {
        &[0]
    }
}

struct Search<'a> {
    /// `allowed[x][y][ox][oy]` for block indices `x <= y`.
    allowed: &'a [Vec<[[bool; 2]; 2]>],
    paired: &'a [usize],
    chosen: Vec<usize>,
    explored: u64,
    budget: u64,
}

impl Search<'_> {
    fn consistent(&self, depth: usize, o: usize) -> bool {
        let x = self.paired[depth];
        self.allowed[x][x][o][o]
            && self.paired[..depth]
                .iter()
                .zip(&self.chosen)
                .all(|(&y, &oy)| self.allowed[y][x][oy][o])
    }

    fn run(&mut self, depth: usize) -> Option<bool> {
        if depth == self.paired.len() {
            return Some(true);
        }
        for o in [0, 1] {
            self.explored += 1;
            if self.explored > self.budget {
                return None;
            }
            if self.consistent(depth, o) {
                self.chosen.push(o);
                match self.run(depth + 1) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                self.chosen.pop();
            }
        }
        Some(false)
    }
}

/// Rotate the given pairs of a rank-3 module and take the limit at `q`.
///
/// At generic `q` every element is already finite and the result is an
/// orthogonal change of basis of the primitive representation.
pub fn build_rotated_sl3(
    top: &TopRow,
    q: &QPoint,
    pairs: &[RotatedPair],
    budget: u64,
) -> Result<GeneratorSet, AtypicalError> {
    if top.rank() != 3 {
        return Err(AtypicalError::RankUnsupported(top.rank()));
    }
    let basis = enumerate_basis(top);
    let n = basis.len();
    let fs = primitive_f(&basis, q);
    let blks = blocks(n, pairs, q);

    let nb = blks.len();
    let mut allowed = vec![vec![[[false; 2]; 2]; nb]; nb];
    for x in 0..nb {
        for y in x..nb {
            for &ox in orientations(&blks[x]) {
                for &oy in orientations(&blks[y]) {
                    let ok = block_pair_finite(&fs, &blks[x], ox, &blks[y], oy)
                        && block_pair_finite(&fs, &blks[y], oy, &blks[x], ox);
                    allowed[x][y][ox][oy] = ok;
                    allowed[y][x][oy][ox] = ok;
                }
            }
        }
    }
    // fixed blocks act as unary constraints on the paired ones
    let fixed: Vec<usize> = (0..nb).filter(|&x| blks[x].pair.is_none()).collect();
    let paired: Vec<usize> = (0..nb).filter(|&x| blks[x].pair.is_some()).collect();
    for (i, &x) in fixed.iter().enumerate() {
        for &y in &fixed[i..] {
            if !allowed[x][y][0][0] {
                let a = blks[x].members[0];
                return Err(AtypicalError::UnresolvedDivergence {
                    pattern: basis.state(a).clone(),
                    l: 2,
                    detail: format!(
                        "element between {} and {} diverges and neither state is rotated",
                        basis.state(a),
                        basis.state(blks[y].members[0])
                    ),
                });
            }
        }
    }
    for &x in &paired {
        for o in [0, 1] {
            if !fixed.iter().all(|&y| allowed[x][y][o][0]) {
                allowed[x][x][o][o] = false;
            }
        }
    }
    let mut search = Search {
        allowed: &allowed,
        paired: &paired,
        chosen: Vec::new(),
        explored: 0,
        budget,
    };
    let found = search.run(0);
    let explored = search.explored;
    let chosen = match found {
        Some(true) => search.chosen,
        Some(false) | None => {
            let first = pairs.first().map(|p| basis.state(p.upper).clone()).unwrap_or_else(|| basis.state(0).clone());
            let detail = if found.is_none() {
                format!("orientation search exceeded its budget of {budget} choices")
            } else {
                format!("no orientation of {} rotated pairs keeps every element finite ({explored} choices tried)", pairs.len())
            };
            return Err(AtypicalError::UnresolvedDivergence {
                pattern: first,
                l: 2,
                detail,
            });
        }
    };
    let mut orient = vec![0usize; nb];
    for (&x, &o) in paired.iter().zip(&chosen) {
        orient[x] = o;
    }

    let mut f = vec![SparseMatrix::zeros(n); 2];
    for (level, series) in fs.iter().enumerate() {
        for (xi, x) in blks.iter().enumerate() {
            for (yi, y) in blks.iter().enumerate() {
                for ((a, b), s) in rotated_entries(series, x, orient[xi], y, orient[yi]) {
                    let v = s.limit(LIMIT_TOL).expect("orientation search admits only finite limits");
                    f[level].set(a, b, v);
                }
            }
        }
    }
    let e = f.iter().map(SparseMatrix::transpose).collect();

    let mut rotated = pairs.to_vec();
    for (k, pair) in rotated.iter_mut().enumerate() {
        let x = blks.iter().position(|b| b.pair == Some(k)).expect("every pair has a block");
        pair.orientation = if orient[x] == 0 { 1 } else { -1 };
    }
    let divergent_states = match q.order() {
        Some(m) => basis
            .states()
            .iter()
            .enumerate()
            .filter_map(|(i, p)| detect_case_sl3(p, m).ok().flatten().map(|c| (i, c)))
            .collect(),
        None => Vec::new(),
    };
    Ok(GeneratorSet {
        k_exponents: k_exponent_table(&basis),
        basis,
        q: *q,
        convention: Convention::ModifiedSl3,
        e,
        f,
        rotation: Some(RotationRecord {
            pairs: rotated,
            sign_choices_explored: explored,
            sign_budget: budget,
            divergent_states,
        }),
    })
}

/// sl(3) module with top row spanning more than `m` at the root of order `m`.
///
/// A span of exactly `m + 1` gives the flat convention; wider tops go
/// through the rotated basis.
pub fn build_atypical_sl3(top: &TopRow, m: UnityOrder) -> Result<GeneratorSet, AtypicalError> {
    if top.rank() != 3 {
        return Err(AtypicalError::RankUnsupported(top.rank()));
    }
    if top.span() <= m.as_i64() {
        return Err(AtypicalError::NotAtypical {
            top: top.values().to_vec(),
            m: m.get(),
        });
    }
    if top.span() == m.as_i64() + 1 {
        return Ok(build_flat_sl3(top, m)?);
    }
    let basis = enumerate_basis(top);
    let pairs = pair_candidates(&basis, m);
    build_rotated_sl3(top, &QPoint::root_of_unity(m), &pairs, DEFAULT_SIGN_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genrep::build_generic_rep;

    fn top(v: &[i64]) -> TopRow {
        TopRow::new(v.to_vec()).unwrap()
    }

    fn m(k: u32) -> UnityOrder {
        UnityOrder::new(k).unwrap()
    }

    fn max_diff(a: &SparseMatrix, b: &SparseMatrix) -> f64 {
        (a.to_dense() - b.to_dense()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pairs_of_the_fifteen_dimensional_module() {
        let basis = enumerate_basis(&top(&[5, 2, 0]));
        let pairs = pair_candidates(&basis, m(3));
        assert_eq!(pairs.len(), 2);
        for p in &pairs {
            let (lo, up) = (basis.state(p.lower), basis.state(p.upper));
            assert_eq!(p.center, 3);
            assert_eq!(lo.entry(1, 2) - lo.entry(2, 2), 2);
            assert_eq!(up.entry(1, 2) - up.entry(2, 2), 4);
            assert_eq!(lo.entry(1, 1), up.entry(1, 1));
        }
    }

    #[test]
    fn builds_fifteen_finite_states() {
        let g = build_atypical_sl3(&top(&[5, 2, 0]), m(3)).unwrap();
        assert_eq!(g.dim(), 15);
        assert!(g.all_finite());
        let rec = g.rotation.as_ref().unwrap();
        assert!(rec.sign_choices_explored <= DEFAULT_SIGN_BUDGET);
        assert!(!rec.divergent_states.is_empty());
        for l in 0..2 {
            assert_eq!(max_diff(&g.e[l], &g.f[l].transpose()), 0.0);
        }
    }

    #[test]
    fn unresolved_divergence_is_reported() {
        assert!(matches!(
            build_atypical_sl3(&top(&[7, 2, 0]), m(3)),
            Err(AtypicalError::UnresolvedDivergence { .. })
        ));
    }

    #[test]
    fn narrow_and_flat_tops() {
        assert!(matches!(
            build_atypical_sl3(&top(&[3, 1, 0]), m(3)),
            Err(AtypicalError::NotAtypical { .. })
        ));
        let flat = build_atypical_sl3(&top(&[4, 2, 0]), m(3)).unwrap();
        assert_eq!(flat.convention, Convention::FlatSl3);
        assert!(matches!(
            build_atypical_sl3(&top(&[4, 2, 1, 0]), m(3)),
            Err(AtypicalError::RankUnsupported(4))
        ));
    }

    #[test]
    fn no_pairs_at_generic_q_reproduces_primitive() {
        let q = QPoint::generic(0.37).unwrap();
        let t = top(&[5, 2, 0]);
        let rotated = build_rotated_sl3(&t, &q, &[], DEFAULT_SIGN_BUDGET).unwrap();
        let plain = build_generic_rep(&t, &q).unwrap();
        for l in 0..2 {
            assert!(max_diff(&rotated.f[l], &plain.f[l]) < 1e-12);
            assert!(max_diff(&rotated.e[l], &plain.e[l]) < 1e-12);
        }
    }

    #[test]
    fn tiny_budget_is_exhausted() {
        let t = top(&[6, 3, 0]);
        let basis = enumerate_basis(&t);
        let pairs = pair_candidates(&basis, m(3));
        assert!(pairs.len() > 1);
        let err = build_rotated_sl3(&t, &QPoint::root_of_unity(m(3)), &pairs, 1).unwrap_err();
        assert!(matches!(err, AtypicalError::UnresolvedDivergence { ref detail, .. } if detail.contains("budget")));
    }
}
