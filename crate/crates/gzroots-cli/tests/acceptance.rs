//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::process::Command;

use gzroots::atypical::{build_atypical_sl3, exchange_map, exchange_map_with_offset, rotation_sl3, AtypicalError, Case};
use gzroots::gzbasis::{cartan_exponent, enumerate_basis, generic_dimension, GZPattern, TopRow};
use gzroots::io::Document;
use gzroots::qarith::{q_bracket, QPoint, UnityOrder};
use gzroots::verify::{
    check_defining_relations, check_root_of_unity_constraints, decompose, invariant_closure, DenseRep,
};
use gzroots::{build_flat_sl3, build_generic_rep};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn top(v: &[i64]) -> TopRow {
    TopRow::new(v.to_vec()).unwrap()
}

fn order(m: u32) -> UnityOrder {
    UnityOrder::new(m).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn unit(n: usize, k: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, 1, |r, _| Complex64::new(if r == k { 1.0 } else { 0.0 }, 0.0))
}

fn strictly_decreasing_tops(n: usize, max_span: i64) -> Vec<Vec<i64>> {
    fn rec(prefix: &mut Vec<i64>, left: usize, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(prefix.iter().rev().copied().collect());
            return;
        }
        let floor = prefix.last().copied().unwrap_or(-1) + 1;
        for v in floor..=floor + 6 {
            prefix.push(v);
            rec(prefix, left - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![0], n - 1, &mut out);
    out.retain(|t| t[0] <= max_span);
    out
}

fn dimension_formula() -> Outcome {
    let mut count = 0;
    for n in [3, 4] {
        for t in strictly_decreasing_tops(n, 6) {
            let t = top(&t);
            let got = enumerate_basis(&t).len() as u128;
            ensure(got == generic_dimension(&t), format!("{:?}: {got} states", t.values()))?;
            count += 1;
        }
    }
    Ok(format!("{count} top rows"))
}

fn generic_relations() -> Outcome {
    let q = QPoint::generic(0.37).unwrap();
    let mut worst: f64 = 0.0;
    for t in [&[3, 1, 0][..], &[4, 2, 0], &[5, 3, 0], &[4, 2, 1, 0]] {
        let g = build_generic_rep(&top(t), &q).map_err(|e| e.to_string())?;
        let r = check_defining_relations(&g, 1e-9).map_err(|e| e.to_string())?;
        ensure(r.residuals.keys().any(|k| k.starts_with("serre_f")), "Serre relations missing")?;
        ensure(r.passed, format!("{t:?}: max residual {:.2e}", r.max_residual()))?;
        worst = worst.max(r.max_residual());
    }
    Ok(format!("max residual {worst:.2e}"))
}

fn flat_seven() -> Outcome {
    let m = order(3);
    let g = build_flat_sl3(&top(&[4, 2, 0]), m).map_err(|e| e.to_string())?;
    ensure(g.dim() == 8 && g.e.iter().all(|x| x.dim() == 8), "matrices are not 8x8")?;
    let trivial: GZPattern = "[[4,2,0],[3,2],[3]]".parse().unwrap();
    let t = g.basis.index_of(&trivial).ok_or("state (3,2;3) missing")?;
    ensure(g.e.iter().chain(&g.f).all(|x| x.column(t).is_empty()), "state (3,2;3) is not annihilated exactly")?;
    let d = decompose(&g, 1e-7).map_err(|e| e.to_string())?;
    let mut dims: Vec<usize> = d.components.iter().map(|c| c.dim).collect();
    dims.sort_unstable();
    ensure(dims == [1, 7] && d.direct_sum, format!("closures {dims:?}"))?;
    let rep = DenseRep::from_generators(&g).map_err(|e| e.to_string())?;
    ensure(invariant_closure(&rep, &unit(8, t), 1e-7).ncols() == 1, "trivial state is not a summand")?;
    ensure(
        d.components.iter().filter(|c| c.dim == 7).all(|c| !c.proper_subspace_found),
        "proper invariant subspace found in the 7-dim component",
    )?;
    let root = check_root_of_unity_constraints(&g, m, 1e-9).map_err(|e| e.to_string())?;
    ensure(root.passed, format!("root constraints {:.2e}", root.max_residual()))?;
    Ok("7 + 1, no proper invariant subspace found in the 7 at tol 1e-7".into())
}

fn flat_eighteen() -> Outcome {
    let m = order(5);
    let t = top(&[6, 2, 0]);
    let g = build_flat_sl3(&t, m).map_err(|e| e.to_string())?;
    ensure(g.dim() == 24, format!("dimension {}", g.dim()))?;
    let hw: GZPattern = "[[6,2,0],[6,2],[6]]".parse().unwrap();
    let k = g.basis.index_of(&hw).ok_or("highest weight missing")?;
    ensure(g.e.iter().all(|x| x.column(k).is_empty()), "highest weight is not singular")?;
    let rep = DenseRep::from_generators(&g).map_err(|e| e.to_string())?;
    let dim = invariant_closure(&rep, &unit(24, k), 1e-7).ncols();
    ensure(dim == 18, format!("closure dimension {dim}"))?;
    let r = check_defining_relations(&g, 1e-8).map_err(|e| e.to_string())?;
    ensure(r.passed, format!("relations {:.2e}", r.max_residual()))?;
    Ok(format!("closure 18, max residual {:.2e}", r.max_residual()))
}

fn atypical_fifteen() -> Outcome {
    let m = order(3);
    let g = match build_atypical_sl3(&top(&[5, 2, 0]), m) {
        Ok(g) => g,
        Err(e @ AtypicalError::UnresolvedDivergence { .. }) => return Err(e.to_string()),
        Err(e) => return Err(e.to_string()),
    };
    ensure(g.dim() == 15 && g.all_finite(), "states missing or non-finite")?;
    let r = check_defining_relations(&g, 1e-8).map_err(|e| e.to_string())?;
    ensure(r.passed, format!("relations {:.2e}", r.max_residual()))?;
    let root = check_root_of_unity_constraints(&g, m, 1e-8).map_err(|e| e.to_string())?;
    ensure(root.passed, format!("root constraints {:.2e}", root.max_residual()))?;
    let rec = g.rotation.as_ref().ok_or("no gauge recorded")?;
    ensure(rec.sign_choices_explored <= 1 << 15, "gauge search over budget")?;
    Ok(format!(
        "max residual {:.2e}, gauge {:?} after {} sign choices",
        r.max_residual().max(root.max_residual()),
        rec.pairs.iter().map(|p| p.orientation).collect::<Vec<_>>(),
        rec.sign_choices_explored
    ))
}

fn q_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    let mut skipped = 0;
    while n < 1000 {
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let Ok(q) = QPoint::generic(angle) else { continue };
        let a = loop {
            let a = rng.gen_range(-20i64..=20);
            if a != 0 {
                break a;
            }
        };
        let b = |k: i64| q_bracket(k, &q).value;
        // generic: q kept away from the zeros of both denominators
        if (b(2) * b(a)).abs() < 1e-3 {
            skipped += 1;
            continue;
        }
        let lhs = b(a + 1) / (b(2) * b(a)) + b(a - 1) / (b(2) * b(a));
        let err = (lhs - 1.0).abs();
        ensure(err < 1e-12, format!("a = {a}, angle = {angle}: error {err:.2e}"))?;
        worst = worst.max(err);
        n += 1;
    }
    Ok(format!("1000 samples, max error {worst:.2e}, {skipped} near-degenerate draws skipped"))
}

fn rotation_orthogonality() -> Outcome {
    let mut worst: f64 = 0.0;
    for angle in [0.37, 0.91, 2.3] {
        let q = QPoint::generic(angle).unwrap();
        for case in [Case::A, Case::B, Case::C] {
            for a in 2..=20 {
                let d = rotation_sl3(case, a, &q).map_err(|e| e.to_string())?.matrix();
                let defect = (d.transpose() * d - nalgebra::Matrix2::identity()).norm();
                ensure(defect < 1e-12, format!("case {case}, a = {a}: {defect:.2e}"))?;
                worst = worst.max(defect);
            }
        }
    }
    Ok(format!("max defect {worst:.2e}"))
}

fn exchange_laws() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xe8c4);
    for _ in 0..500 {
        let m = if rng.gen_bool(0.5) { 3 } else { 5 };
        let mm = order(m as u32);
        let l = rng.gen_range(2..=4usize);
        // entries 2..l congruent mod m and spaced by multiples of m; entry 1 off by zeta
        let mut tail = vec![rng.gen_range(0..=3i64)];
        for _ in 1..l - 1 {
            let last = *tail.last().unwrap();
            tail.push(last + m * rng.gen_range(1..=2));
        }
        tail.reverse();
        let zeta = rng.gen_range(1..m);
        let mut row = vec![tail[0] + zeta + m * rng.gen_range(0..=3)];
        row.extend(tail);
        let mut rows = vec![vec![0; l + 1], row.clone()];
        rows.extend((1..l).rev().map(|k| vec![0; k]));
        let p = GZPattern::from_rows(rows).unwrap();
        for mu in 2..=l {
            let first = exchange_map_with_offset(&p, l, 1, mu, zeta, mm).map_err(|e| e.to_string())?;
            for lev in 1..=l {
                ensure(
                    cartan_exponent(&first, lev) == cartan_exponent(&p, lev),
                    format!("row {row:?}: exponent changed at level {lev}"),
                )?;
            }
            for nu in (2..=l).filter(|&nu| nu != mu) {
                let lhs = exchange_map_with_offset(&first, l, mu, nu, zeta, mm).map_err(|e| e.to_string())?;
                let rhs = exchange_map_with_offset(&p, l, 1, nu, zeta, mm).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, format!("row {row:?}: composition ({mu},{nu}) fails"))?;
                if mu < nu {
                    let step = exchange_map(&p, l, 1, mu, mm).map_err(|e| e.to_string())?;
                    let lhs = exchange_map(&step, l, mu, nu, mm).map_err(|e| e.to_string())?;
                    let rhs = exchange_map(&p, l, 1, nu, mm).map_err(|e| e.to_string())?;
                    ensure(lhs == rhs, format!("row {row:?}: residue composition ({mu},{nu}) fails"))?;
                }
            }
        }
    }
    Ok("500 rows".into())
}

fn cli_round_trip() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_gzroots");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for args in [
        vec!["--top", "5,2,0", "--m", "3"],
        vec!["--top", "4,2,0", "--m", "3"],
        vec!["--top", "4,2,1,0", "--generic-angle", "0.37"],
    ] {
        let path = dir.path().join(format!("build{files}.json"));
        let status = Command::new(bin)
            .arg("build")
            .args(&args)
            .arg("--out")
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), format!("build {args:?} exited with {status}"))?;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let again = Document::from_json(&text).map_err(|e| e.to_string())?.to_canonical_json();
        ensure(again == text, format!("{args:?}: re-serialization differs"))?;
        let copy = dir.path().join(format!("copy{files}.json"));
        let status = Command::new(bin)
            .args(["export", "--format", "json", "--out"])
            .arg(&copy)
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), "export failed")?;
        ensure(std::fs::read(&copy).map_err(|e| e.to_string())? == text.as_bytes(), "export differs")?;
        files += 1;
    }
    for case in ["flat-7", "flat-18", "atypical-15"] {
        let out = Command::new(bin).args(["paper-case", case]).output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), format!("paper-case {case} exited with {}", out.status))?;
    }
    Ok(format!("{files} builds byte-identical, 3 worked cases exit 0"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("dimension formula matches enumeration", dimension_formula),
        ("generic-q relation suite", generic_relations),
        ("flat (4,2,0) at m=3: 7 + 1", flat_seven),
        ("flat (6,2,0) at m=5: closure 18", flat_eighteen),
        ("modified (5,2,0) at m=3: 15 finite states", atypical_fifteen),
        ("q-number identity", q_identity),
        ("rotation orthogonality", rotation_orthogonality),
        ("exchange-map laws", exchange_laws),
        ("CLI round trip and worked cases", cli_round_trip),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", k + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {name} ({why})", k + 1);
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
