//! Named worked examples.

use std::path::Path;

use gzroots::genrep::GeneratorSet;
use gzroots::gzbasis::{GZPattern, TopRow};
use gzroots::io::Document;
use gzroots::qarith::{QPoint, UnityOrder};
use gzroots::verify::{
    check_defining_relations, check_root_of_unity_constraints, decompose, invariant_closure, invariant_subspace_scan,
    DenseRep, DEFAULT_RANK_TOL,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{build, build_report, write_output, ConventionArg, Failure, WorkedCase};

struct Checks {
    failed: Vec<String>,
}

impl Checks {
    fn record(&mut self, what: &str, ok: bool) {
        println!("  [{}] {what}", if ok { "ok" } else { "FAIL" });
        if !ok {
            self.failed.push(what.to_string());
        }
    }
}

fn highest_weight(top: &TopRow) -> GZPattern {
    let v = top.values();
    GZPattern::from_rows((0..v.len()).map(|k| v[..v.len() - k].to_vec()).collect()).expect("prefix rows")
}

fn unit(n: usize, k: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, 1, |r, _| Complex64::new(if r == k { 1.0 } else { 0.0 }, 0.0))
}

fn relations(checks: &mut Checks, g: &GeneratorSet, m: UnityOrder, tol: f64) -> Result<(), Failure> {
    let rel = check_defining_relations(g, tol).map_err(|e| Failure::Config(e.to_string()))?;
    checks.record(&format!("defining relations, max residual {:.2e} <= {tol:.0e}", rel.max_residual()), rel.passed);
    let root = check_root_of_unity_constraints(g, m, tol).map_err(|e| Failure::Config(e.to_string()))?;
    checks.record(
        &format!("e^{m} = f^{m} = 0 and k^{m} = 1, max residual {:.2e}", root.max_residual()),
        root.passed,
    );
    Ok(())
}

pub(crate) fn run_case(name: WorkedCase, tol: Option<f64>, out: Option<&Path>) -> Result<(), Failure> {
    let (values, order, convention, default_tol) = match name {
        WorkedCase::Flat7 => (vec![4, 2, 0], 3, ConventionArg::Flat, 1e-9),
        WorkedCase::Flat18 => (vec![6, 2, 0], 5, ConventionArg::Flat, 1e-8),
        WorkedCase::Atypical15 => (vec![5, 2, 0], 3, ConventionArg::Atypical, 1e-8),
    };
    let tol = tol.unwrap_or(default_tol);
    let top = TopRow::new(values).expect("valid top row");
    let m = UnityOrder::new(order).expect("odd order");
    let g = build(&top, &QPoint::root_of_unity(m), Some(convention))?;
    let rep = DenseRep::from_generators(&g).map_err(|e| Failure::Config(e.to_string()))?;
    println!("{} top {:?} at m = {m}: dimension {}", g.convention.as_str(), top.values(), g.dim());
    let mut checks = Checks { failed: Vec::new() };
    let rank_tol = DEFAULT_RANK_TOL;
    relations(&mut checks, &g, m, tol)?;

    match name {
        WorkedCase::Flat7 => {
            checks.record("8 basis states", g.dim() == 8);
            let trivial: GZPattern = "[[4,2,0],[3,2],[3]]".parse().expect("pattern literal");
            let t = g.basis.index_of(&trivial).expect("trivial state is in the basis");
            let killed = g.e.iter().chain(&g.f).all(|x| x.column(t).is_empty());
            checks.record(&format!("{trivial} annihilated exactly by e1, e2, f1, f2"), killed);
            let d = decompose(&g, rank_tol).map_err(|e| Failure::Config(e.to_string()))?;
            let mut dims: Vec<usize> = d.components.iter().map(|c| c.dim).collect();
            dims.sort_unstable();
            checks.record(&format!("closures of singular vectors {dims:?} form a direct sum 7 + 1"), dims == [1, 7] && d.direct_sum);
            let trivial_dim = invariant_closure(&rep, &unit(g.dim(), t), rank_tol).ncols();
            checks.record("the trivial state spans a 1-dim summand", trivial_dim == 1);
            let clean = d.components.iter().filter(|c| c.dim == 7).all(|c| !c.proper_subspace_found);
            checks.record(&format!("no proper invariant subspace found in the 7-dim component at tol {rank_tol:.0e}"), clean);
        }
        WorkedCase::Flat18 => {
            checks.record("24 basis states", g.dim() == 24);
            let hw = g.basis.index_of(&highest_weight(&top)).expect("highest weight is in the basis");
            let singular = g.e.iter().all(|x| x.column(hw).is_empty());
            checks.record("highest-weight state is singular", singular);
            let dim = invariant_closure(&rep, &unit(g.dim(), hw), rank_tol).ncols();
            checks.record(&format!("closure of the highest-weight vector has dimension {dim} (expected 18)"), dim == 18);
        }
        WorkedCase::Atypical15 => {
            checks.record("15 basis states", g.dim() == 15);
            checks.record("all coefficients finite", g.all_finite());
            if let Some(rec) = &g.rotation {
                println!(
                    "  gauge: {} rotated pairs, orientations {:?}, {} of {} sign choices explored",
                    rec.pairs.len(),
                    rec.pairs.iter().map(|p| p.orientation).collect::<Vec<_>>(),
                    rec.sign_choices_explored,
                    rec.sign_budget
                );
                checks.record("gauge search within budget", rec.sign_choices_explored <= rec.sign_budget);
            }
            let dims = invariant_subspace_scan(&g, rank_tol).map_err(|e| Failure::Config(e.to_string()))?;
            checks.record(&format!("closure dimensions {dims:?} (expected a single 15)"), dims == [15]);
            let d = decompose(&g, rank_tol).map_err(|e| Failure::Config(e.to_string()))?;
            let clean = d.components.iter().all(|c| !c.proper_subspace_found);
            checks.record(&format!("no proper invariant subspace found at tol {rank_tol:.0e}"), clean);
        }
    }

    if let Some(path) = out {
        let report = build_report(&g, tol);
        write_output(Some(path), &Document::new(g, report).to_canonical_json())?;
    }
    if checks.failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} check(s) failed: {}", checks.failed.len(), checks.failed.join("; "))))
    }
}
