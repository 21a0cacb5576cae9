use gzroots::atypical::{build_atypical_sl3, pair_candidates};
use gzroots::gzbasis::{enumerate_basis, TopRow};
use gzroots::qarith::{QPoint, UnityOrder};
use gzroots::verify::{check_defining_relations, check_root_of_unity_constraints, decompose, invariant_subspace_scan};
use gzroots::{build_flat_sl3, build_generic_rep};

fn top(v: &[i64]) -> TopRow {
    TopRow::new(v.to_vec()).unwrap()
}

fn m(k: u32) -> UnityOrder {
    UnityOrder::new(k).unwrap()
}

#[test]
fn generic_tops_satisfy_every_relation() {
    let q = QPoint::generic(0.37).unwrap();
    for t in [&[3, 1, 0][..], &[4, 2, 0], &[5, 3, 0], &[4, 2, 1, 0]] {
        let g = build_generic_rep(&top(t), &q).unwrap();
        let r = check_defining_relations(&g, 1e-9).unwrap();
        assert!(r.passed, "{t:?}: {}", r.max_residual());
    }
}

#[test]
fn atypical_fifteen() {
    let g = build_atypical_sl3(&top(&[5, 2, 0]), m(3)).unwrap();
    assert_eq!(g.dim(), 15);
    let r = check_defining_relations(&g, 1e-8).unwrap();
    assert!(r.passed, "{:?}", r.residuals);
    let r = check_root_of_unity_constraints(&g, m(3), 1e-8).unwrap();
    assert!(r.passed, "{:?}", r.residuals);
    assert_eq!(invariant_subspace_scan(&g, 1e-7).unwrap(), vec![15]);
    let d = decompose(&g, 1e-7).unwrap();
    assert!(d.direct_sum && !d.components[0].proper_subspace_found);
}

#[test]
fn flat_eighteen() {
    let g = build_flat_sl3(&top(&[6, 2, 0]), m(5)).unwrap();
    assert_eq!(g.dim(), 24);
    assert!(check_defining_relations(&g, 1e-8).unwrap().passed);
    assert!(check_root_of_unity_constraints(&g, m(5), 1e-8).unwrap().passed);
}

#[test]
fn other_rotated_modules_verify() {
    for (t, order) in [(&[5, 3, 0][..], 3), (&[6, 2, 0], 3), (&[6, 3, 0], 3), (&[7, 2, 0], 5), (&[8, 2, 0], 5)] {
        let mm = m(order);
        let g = build_atypical_sl3(&top(t), mm).unwrap();
        assert!(!pair_candidates(&enumerate_basis(&top(t)), mm).is_empty());
        let r = check_defining_relations(&g, 1e-8).unwrap();
        assert!(r.passed, "{t:?} m={order}: {}", r.max_residual());
        assert!(check_root_of_unity_constraints(&g, mm, 1e-8).unwrap().passed, "{t:?}");
    }
}
