//! Numerical checks of a built representation.
//!
//! Everything here looks only at the matrices `e_l`, `f_l`, `k_l` and the
//! value of `q`; basis labels are never consulted.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::genrep::GeneratorSet;
use crate::qarith::UnityOrder;

/// Relation residual tolerance used when none is given.
pub const DEFAULT_RELATION_TOL: f64 = 1e-9;
/// Tolerance for nullspace and rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-7;
/// Largest dimension the dense verifier accepts.
pub const MAX_DENSE_DIM: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("dimension {0} exceeds the dense verifier limit of {MAX_DENSE_DIM}")]
    TooLarge(usize),
    #[error("representation was built at {found}, expected a root of unity of order {expected}")]
    OrderMismatch { expected: u32, found: String },
}

type Mat = DMatrix<Complex64>;

fn max_norm(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The relations checked and the Cartan matrix they use.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationSuite {
    pub cartan_matrix: Vec<Vec<i64>>,
    pub tolerance: f64,
}

impl RelationSuite {
    /// Suite for `sl(levels + 1)`.
    pub fn new(levels: usize, tolerance: f64) -> Self {
        let cartan_matrix = (0..levels)
            .map(|i| {
                (0..levels)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        Self {
            cartan_matrix,
            tolerance,
        }
    }

    /// Max-norm residual of every defining relation, keyed by name.
    pub fn residuals(&self, rep: &DenseRep) -> BTreeMap<String, f64> {
        let levels = rep.e.len();
        let q = rep.q;
        let qi = q.inv();
        let q_pow = |a: i64| q.powi(a as i32);
        let two = q + qi;
        let mut out = BTreeMap::new();
        for i in 0..levels {
            let ki = &rep.k[i];
            let ki_inv = &rep.k_inv[i];
            for j in 0..levels {
                let a = self.cartan_matrix[i][j];
                let (ej, fj) = (&rep.e[j], &rep.f[j]);
                let (x, y) = (i + 1, j + 1);
                out.insert(format!("ke[{x},{y}]"), max_norm(&(ki * ej * ki_inv - ej * q_pow(a))));
                out.insert(format!("kf[{x},{y}]"), max_norm(&(ki * fj * ki_inv - fj * q_pow(-a))));
                let mut ef = &rep.e[i] * fj - fj * &rep.e[i];
                if i == j {
                    ef -= (ki - ki_inv) / (q - qi);
                }
                out.insert(format!("ef[{x},{y}]"), max_norm(&ef));
                if i.abs_diff(j) > 1 && i < j {
                    let (ei, fi) = (&rep.e[i], &rep.f[i]);
                    out.insert(format!("ee[{x},{y}]"), max_norm(&(ei * ej - ej * ei)));
                    out.insert(format!("ff[{x},{y}]"), max_norm(&(fi * fj - fj * fi)));
                }
                if i.abs_diff(j) == 1 {
                    for (name, a, b) in [("serre_e", &rep.e[i], ej), ("serre_f", &rep.f[i], fj)] {
                        let aa = a * a;
                        let r = &aa * b - a * b * a * two + b * &aa;
                        out.insert(format!("{name}[{x},{y}]"), max_norm(&r));
                    }
                }
            }
        }
        out
    }
}

/// Dense copy of a generator set.
#[derive(Debug, Clone)]
pub struct DenseRep {
    pub q: Complex64,
    pub e: Vec<Mat>,
    pub f: Vec<Mat>,
    pub k: Vec<Mat>,
    pub k_inv: Vec<Mat>,
}

impl DenseRep {
    pub fn from_generators(g: &GeneratorSet) -> Result<Self, VerifyError> {
        let n = g.dim();
        if n > MAX_DENSE_DIM {
            return Err(VerifyError::TooLarge(n));
        }
        let diag = |exps: &[i64], sign: i64| {
            Mat::from_diagonal(&DVector::from_iterator(n, exps.iter().map(|&h| g.q.pow(sign * h))))
        };
        Ok(Self {
            q: g.q.value(),
            e: g.e.iter().map(|m| m.to_dense()).collect(),
            f: g.f.iter().map(|m| m.to_dense()).collect(),
            k: g.k_exponents.iter().map(|h| diag(h, 1)).collect(),
            k_inv: g.k_exponents.iter().map(|h| diag(h, -1)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.k.first().map_or(0, |k| k.nrows())
    }

    fn generators(&self) -> impl Iterator<Item = &Mat> {
        self.e.iter().chain(&self.f).chain(&self.k)
    }

    /// The action on the span of the orthonormal columns of `q`; exact when that span is invariant.
    pub fn restrict(&self, q: &Mat) -> Self {
        let r = |m: &Mat| q.adjoint() * m * q;
        Self {
            q: self.q,
            e: self.e.iter().map(r).collect(),
            f: self.f.iter().map(r).collect(),
            k: self.k.iter().map(r).collect(),
            k_inv: self.k_inv.iter().map(r).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub singular_vectors: Vec<Vec<Complex64>>,
    pub invariant_dims: Vec<usize>,
}

impl VerificationReport {
    fn from_residuals(residuals: BTreeMap<String, f64>, tolerance: f64) -> Self {
        let passed = residuals.values().all(|&r| r <= tolerance);
        Self {
            residuals,
            tolerance,
            passed,
            singular_vectors: Vec::new(),
            invariant_dims: Vec::new(),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    /// Combine two reports; `passed` requires both.
    pub fn merge(mut self, other: Self) -> Self {
        self.residuals.extend(other.residuals);
        self.passed &= other.passed;
        self.tolerance = self.tolerance.max(other.tolerance);
        self.singular_vectors.extend(other.singular_vectors);
        self.invariant_dims.extend(other.invariant_dims);
        self
    }
}

pub fn check_defining_relations(g: &GeneratorSet, tol: f64) -> Result<VerificationReport, VerifyError> {
    let rep = DenseRep::from_generators(g)?;
    let suite = RelationSuite::new(g.levels(), tol);
    Ok(VerificationReport::from_residuals(suite.residuals(&rep), tol))
}

/// Residuals of `e_l^m = 0`, `f_l^m = 0` and `k_l^m = 1`.
pub fn check_root_of_unity_constraints(
    g: &GeneratorSet,
    m: UnityOrder,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    if g.q.order() != Some(m) {
        return Err(VerifyError::OrderMismatch {
            expected: m.get(),
            found: match g.q.order() {
                Some(o) => format!("a root of unity of order {o}"),
                None => format!("generic q with angle {}", g.q.angle()),
            },
        });
    }
    let rep = DenseRep::from_generators(g)?;
    let power = |a: &Mat| (1..m.get()).fold(a.clone(), |acc, _| &acc * a);
    let mut residuals = BTreeMap::new();
    for l in 0..rep.e.len() {
        let x = l + 1;
        residuals.insert(format!("e^m[{x}]"), max_norm(&power(&rep.e[l])));
        residuals.insert(format!("f^m[{x}]"), max_norm(&power(&rep.f[l])));
        // k is stored by exponent, so k^m is q^(m h) exactly
        let km = g.k_exponents[l]
            .iter()
            .map(|&h| (g.q.pow(i64::from(m.get()) * h) - 1.0).norm())
            .fold(0.0, f64::max);
        residuals.insert(format!("k^m[{x}]"), km);
    }
    Ok(VerificationReport::from_residuals(residuals, tol))
}

/// Orthonormal basis of the column span, dropping singular values at or below `tol`.
pub fn orthonormal_span(columns: &Mat, tol: f64) -> Mat {
    if columns.ncols() == 0 {
        return columns.clone();
    }
    let svd = columns.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > tol)
        .collect();
    Mat::from_fn(columns.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

fn nullspace(a: &Mat, n: usize, tol: f64) -> Mat {
    if a.nrows() == 0 || max_norm(a) == 0.0 {
        return Mat::identity(n, n);
    }
    // pad so that the SVD returns all n right singular vectors
    let padded = if a.nrows() < n {
        a.clone().insert_rows(a.nrows(), n - a.nrows(), Complex64::new(0.0, 0.0))
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] < tol)
        .collect();
    Mat::from_fn(n, keep.len(), |r, c| vt[(keep[c], r)].conj())
}

/// Indices grouped by their tuple of `k` eigenvalues; `k` is diagonal.
fn weight_groups(rep: &DenseRep) -> Vec<Vec<usize>> {
    let mut groups: Vec<(Vec<Complex64>, Vec<usize>)> = Vec::new();
    for s in 0..rep.dim() {
        let w: Vec<Complex64> = rep.k.iter().map(|k| k[(s, s)]).collect();
        match groups
            .iter_mut()
            .find(|(v, _)| v.iter().zip(&w).all(|(a, b)| (a - b).norm() < 1e-9))
        {
            Some((_, idx)) => idx.push(s),
            None => groups.push((w, vec![s])),
        }
    }
    groups.into_iter().map(|(_, idx)| idx).collect()
}

fn is_diagonal(m: &Mat) -> bool {
    m.iter()
        .enumerate()
        .all(|(k, z)| k % (m.nrows() + 1) == 0 || *z == Complex64::new(0.0, 0.0))
}

/// Joint kernel of all `e_l`, split into `k` weight spaces when `k` is diagonal.
///
/// Returns orthonormal vectors (columns), weight by weight.
pub fn singular_subspaces(rep: &DenseRep, tol: f64) -> Vec<Mat> {
    let n = rep.dim();
    let stacked = rep.e.iter().fold(Mat::zeros(0, n), |acc, e| {
        let r = acc.nrows();
        let mut out = acc.insert_rows(r, n, Complex64::new(0.0, 0.0));
        out.rows_mut(r, n).copy_from(e);
        out
    });
    let kernel = nullspace(&stacked, n, tol);
    if kernel.ncols() == 0 {
        return Vec::new();
    }
    if !rep.k.iter().all(is_diagonal) {
        return vec![kernel];
    }
    let mut out = Vec::new();
    for group in weight_groups(rep) {
        let mut proj = Mat::zeros(n, kernel.ncols());
        for &s in &group {
            proj.row_mut(s).copy_from(&kernel.row(s));
        }
        let span = orthonormal_span(&proj, tol);
        if span.ncols() > 0 {
            out.push(span);
        }
    }
    out
}

pub fn find_singular_vectors(g: &GeneratorSet, tol: f64) -> Result<Vec<DVector<Complex64>>, VerifyError> {
    let rep = DenseRep::from_generators(g)?;
    Ok(singular_subspaces(&rep, tol)
        .iter()
        .flat_map(|m| m.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
        .collect())
}

/// Orthonormal basis of the smallest subspace containing `seeds` and stable
/// under every generator.
pub fn invariant_closure(rep: &DenseRep, seeds: &Mat, tol: f64) -> Mat {
    let mut span = orthonormal_span(seeds, tol);
    for _ in 0..=rep.dim() {
        let mut cols: Vec<DVector<Complex64>> = span.column_iter().map(|c| c.into_owned()).collect();
        for g in rep.generators() {
            let image = g * &span;
            cols.extend(image.column_iter().map(|c| c.into_owned()));
        }
        let next = orthonormal_span(&Mat::from_columns(&cols), tol);
        if next.ncols() == span.ncols() {
            return next;
        }
        span = next;
    }
    span
}

/// Dimension of the closure of each singular vector.
pub fn invariant_subspace_scan(g: &GeneratorSet, tol: f64) -> Result<Vec<usize>, VerifyError> {
    let rep = DenseRep::from_generators(g)?;
    Ok(singular_subspaces(&rep, tol)
        .iter()
        .flat_map(|space| {
            space
                .column_iter()
                .map(|c| invariant_closure(&rep, &Mat::from_columns(&[c.into_owned()]), tol).ncols())
                .collect::<Vec<_>>()
        })
        .collect())
}

/// Whether a proper nonzero invariant subspace was found inside the
/// invariant span of the orthonormal columns of `space`.
///
/// Every nonzero invariant subspace contains a singular vector, so none
/// exists when the singular vectors form a single line whose closure is the
/// whole space. Anything else counts as found.
pub fn proper_invariant_subspace_found(rep: &DenseRep, space: &Mat, tol: f64) -> bool {
    let sub = rep.restrict(space);
    let singular = singular_subspaces(&sub, tol);
    match singular.as_slice() {
        [line] if line.ncols() == 1 => invariant_closure(&sub, line, tol).ncols() < space.ncols(),
        _ => true,
    }
}

/// One summand found by [`decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub dim: usize,
    pub proper_subspace_found: bool,
}

/// Closures of the singular vectors, and whether they add up to a direct sum
/// of the whole module.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub components: Vec<Component>,
    pub direct_sum: bool,
}

pub fn decompose(g: &GeneratorSet, tol: f64) -> Result<Decomposition, VerifyError> {
    let rep = DenseRep::from_generators(g)?;
    let mut closures = Vec::new();
    for space in singular_subspaces(&rep, tol) {
        for c in space.column_iter() {
            closures.push(invariant_closure(&rep, &Mat::from_columns(&[c.into_owned()]), tol));
        }
    }
    let total: usize = closures.iter().map(|c| c.ncols()).sum();
    let all: Vec<DVector<Complex64>> = closures
        .iter()
        .flat_map(|c| c.column_iter().map(|v| v.into_owned()).collect::<Vec<_>>())
        .collect();
    let joint = if all.is_empty() {
        0
    } else {
        orthonormal_span(&Mat::from_columns(&all), tol).ncols()
    };
    Ok(Decomposition {
        direct_sum: total == rep.dim() && joint == rep.dim(),
        components: closures
            .iter()
            .map(|c| Component {
                dim: c.ncols(),
                proper_subspace_found: proper_invariant_subspace_found(&rep, c, tol),
            })
            .collect(),
    })
}

/// Relations, root-of-unity constraints when `q` is a root, singular vectors
/// and closure dimensions in one report.
pub fn full_report(g: &GeneratorSet, tol: f64, rank_tol: f64) -> Result<VerificationReport, VerifyError> {
    let mut report = check_defining_relations(g, tol)?;
    if let Some(m) = g.q.order() {
        report = report.merge(check_root_of_unity_constraints(g, m, tol)?);
    }
    report.singular_vectors = find_singular_vectors(g, rank_tol)?
        .into_iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    report.invariant_dims = invariant_subspace_scan(g, rank_tol)?;
    Ok(report)
}
