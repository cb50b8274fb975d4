use cartanlab::bending::{
    bend, boost_y, centralizer_in_algebra, module_decomposition_check, so_form_algebra, so_m1_in_m2,
    zariski_density_witness, QuadFormSpace, DEFAULT_RADICAND,
};
use cartanlab::catalog;
use cartanlab::stability::{cone_gap_sup, Subspace};
use cartanlab::wordgroups::check_relators;

#[test]
fn module_splitting_for_small_m() {
    for m in 2..=4 {
        let v = module_decomposition_check(m).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.dim_w, m + 1);
        assert_eq!(v.dim_so_m2, (m + 2) * (m + 1) / 2);
    }
}

#[test]
fn density_witness_tracks_the_direction() {
    for m in 2..=3 {
        let space = QuadFormSpace::so_m2(m, DEFAULT_RADICAND).unwrap();
        let y = boost_y(&space);
        assert!(!zariski_density_witness(&y, 0.0, &space).unwrap().dense);
        for t in [1e-3, 1e-2, 0.1, 0.5, 1.0] {
            let v = zariski_density_witness(&y, t, &space).unwrap();
            assert!(v.dense, "m = {m}, t = {t}: {v:?}");
        }
        for h in &so_m1_in_m2(&space).unwrap().basis {
            assert!(!zariski_density_witness(h, 0.5, &space).unwrap().dense);
        }
    }
}

#[test]
fn bent_families_satisfy_relators() {
    for fam in [catalog::bending_amalgam().unwrap(), catalog::bending_hnn().unwrap()] {
        for t in [0.0, 1e-3, 0.01, 0.1, 0.3, 1.0] {
            let phi = bend(&fam, t).unwrap();
            assert!(check_relators(&fam.presentation, &phi).unwrap().pass);
        }
    }
}

#[test]
fn boost_commutes_with_the_amalgamated_subgroup() {
    let fam = catalog::bending_amalgam().unwrap();
    let c = fam.presentation.generators()[1].matrix().clone();
    let z = centralizer_in_algebra(&[c], &so_form_algebra(&fam.space)).unwrap();
    assert!(z.contains(&fam.y));
}

#[test]
fn cone_gap_sup_shrinks_with_delta() {
    let e1 = Subspace::span(3, &[vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0]]).unwrap();
    let sups: Vec<f64> = [0.3, 0.1, 0.03].iter().map(|&d| cone_gap_sup(&e1, d, 1.0, 400, 9).unwrap()).collect();
    assert!(sups.windows(2).all(|w| w[1] < w[0]), "{sups:?}");
}
