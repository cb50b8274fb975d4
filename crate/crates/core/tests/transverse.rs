use cartanlab::catalog;
use cartanlab::transverse::{decompose, DecomposeOptions, Decomposer, RankOneModel};
use cartanlab::wordgroups::word_ball;

#[test]
fn cyclic_example_cuts_evenly() {
    let p = catalog::cyclic_diag().unwrap();
    // a has displacement 4 on the hyperbolic plane
    for (k, step, pieces) in [(6, 8.0, 3), (5, 4.0, 5), (4, 16.0, 1)] {
        let w = p.parse_word(&format!("a^{k}")).unwrap();
        let d = decompose(&w, &p, &RankOneModel::Sl2, step, &DecomposeOptions::default()).unwrap();
        assert_eq!(d.factors.len(), pieces, "{d:?}");
        assert!(d.factors.windows(2).all(|f| f[0] == f[1]), "{d:?}");
        assert!(d.d_achieved < 1e-9);
        assert!(d.reassembles);
    }
}

#[test]
fn schottky_ball_decomposes_within_ceiling() {
    let p = catalog::schottky_sl2().unwrap();
    let step = catalog::schottky_sl2_step();
    let dec = Decomposer::new(&p, RankOneModel::Sl2, 6, &DecomposeOptions::default()).unwrap();
    let ball = word_ball(&p, &p.inclusion(), 6).unwrap();
    assert_eq!(ball.len(), 1457);
    let mut worst: f64 = 0.0;
    for e in &ball.entries {
        let d = dec.decompose(&e.word, step).unwrap();
        assert!(d.reassembles, "{}", d.word);
        assert!(d.gaps.iter().all(|&g| g >= -d.d_achieved - 1e-12), "{d:?}");
        assert!(d.d_achieved <= d.ceiling + 1e-9, "{d:?}");
        assert!(d.bounds_hold(1e-12));
        worst = worst.max(d.d_achieved);
    }
    assert!(worst.is_finite());
}

#[test]
fn tree_decomposition_of_padic_diag_powers() {
    use cartanlab::wordgroups::Presentation;
    let g = catalog::padic_diag().unwrap();
    let p = Presentation::free(&["a"], vec![g]).unwrap();
    let w = p.parse_word("a^4").unwrap();
    let d = decompose(&w, &p, &RankOneModel::Tree { p: 3 }, 4.0, &DecomposeOptions::default()).unwrap();
    assert_eq!(d.factors, vec!["a^2", "a^2"]);
    assert_eq!(d.d_achieved, 0.0);
}
