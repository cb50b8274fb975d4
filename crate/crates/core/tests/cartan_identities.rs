use cartanlab::cartan::{
    cartan, lattice_diff, norm_le_sum_exact, wedge_norm_exponent, wedge_norm_log, weight_pairing, weight_pairing_exact,
    GroupDesc, GroupElement,
};
use cartanlab::catalog;
use cartanlab::fields::FieldDesc;
use cartanlab::linalg::Matrix;
use cartanlab::samples::{random_sl_padic, random_sl_real_element};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sq(v: &[i64]) -> i64 {
    v.iter().map(|x| x * x).sum()
}

#[test]
fn triangle_and_difference_bounds_real() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let g = random_sl_real_element(3, &mut rng);
        let h = random_sl_real_element(3, &mut rng);
        let (mg, mh, mgh) = (cartan(&g).unwrap(), cartan(&h).unwrap(), cartan(&g.mul(&h).unwrap()).unwrap());
        let tol = 1e-9 * (1.0 + mg.norm() + mh.norm());
        assert!(mgh.norm() <= mg.norm() + mh.norm() + tol);
        assert!(mgh.dist(&mh) <= mg.norm() + tol);
        assert!(mgh.dist(&mg) <= mh.norm() + tol);
    }
}

#[test]
fn triangle_and_difference_bounds_padic_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grp = GroupDesc::sl(2, FieldDesc::padic(3).unwrap()).unwrap();
    for _ in 0..300 {
        let g = GroupElement::new(Matrix::Rational(random_sl_padic(2, 3, 6, &mut rng)), grp.clone()).unwrap();
        let h = GroupElement::new(Matrix::Rational(random_sl_padic(2, 3, 6, &mut rng)), grp.clone()).unwrap();
        let (mg, mh, mgh) = (cartan(&g).unwrap(), cartan(&h).unwrap(), cartan(&g.mul(&h).unwrap()).unwrap());
        let (g2, h2) = (mg.norm_sq_exact().unwrap(), mh.norm_sq_exact().unwrap());
        assert!(norm_le_sum_exact(mgh.norm_sq_exact().unwrap(), g2, h2));
        // ‖a − b‖ ≤ ‖c‖ ⇔ ‖a − b‖² ≤ ‖c‖²
        assert!(sq(&lattice_diff(&mgh, &mh).unwrap()) <= g2);
        assert!(sq(&lattice_diff(&mgh, &mg).unwrap()) <= h2);
    }
}

#[test]
fn closed_forms() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mu = cartan(&catalog::unipotent().unwrap()).unwrap();
    assert!((mu.coords[0] - phi.ln()).abs() < 1e-12);
    assert!((mu.coords[1] + phi.ln()).abs() < 1e-12);
    let mu = cartan(&catalog::padic_diag().unwrap()).unwrap();
    assert_eq!(mu.lattice, Some(vec![1, -1]));
}

#[test]
fn wedge_identity_real() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let g = random_sl_real_element(3, &mut rng);
        let mu = cartan(&g).unwrap();
        for i0 in 1..=2 {
            assert!((wedge_norm_log(&g, i0).unwrap() - weight_pairing(i0, &mu).unwrap()).abs() < 1e-8);
        }
    }
}

#[test]
fn wedge_identity_padic_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grp = GroupDesc::sl(3, FieldDesc::padic(3).unwrap()).unwrap();
    for _ in 0..50 {
        let g = GroupElement::new(Matrix::Rational(random_sl_padic(3, 3, 10, &mut rng)), grp.clone()).unwrap();
        let mu = cartan(&g).unwrap();
        for i0 in 1..=2 {
            assert_eq!(wedge_norm_exponent(&g, i0).unwrap(), weight_pairing_exact(i0, &mu).unwrap());
        }
    }
}
