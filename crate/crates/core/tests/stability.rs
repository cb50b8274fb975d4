use cartanlab::bending::bend;
use cartanlab::cartan::cartan;
use cartanlab::catalog;
use cartanlab::cartan::GroupElement;
use cartanlab::linalg::Matrix;
use cartanlab::samples::{random_so_cayley, sl_axis_samples};
use cartanlab::stability::{delta_l_constants, mu_cone, properness_scan, stability_scan, MuCone};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bending_trend_is_strict() {
    let fam = catalog::bending_amalgam().unwrap();
    let pres = &fam.presentation;
    let incl = pres.inclusion();
    let mut prev = None;
    for t in [0.0, 0.01, 0.1, 0.3] {
        let phi = bend(&fam, t).unwrap();
        let rep = stability_scan(pres, &incl, &phi, 4, None).unwrap();
        assert!(rep.envelope_valid(1e-12));
        if t == 0.0 {
            assert_eq!((rep.eps_hat, rep.c_hat), (0.0, 0.0));
        }
        if let Some(e) = prev {
            assert!(rep.eps_hat > e, "t = {t}: {} after {e}", rep.eps_hat);
        }
        prev = Some(rep.eps_hat);
    }
}

#[test]
fn conjugation_stays_within_twice_the_conjugator() {
    let fam = catalog::bending_amalgam().unwrap();
    let pres = &fam.presentation;
    let incl = pres.inclusion();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..3 {
        let g = random_so_cayley(fam.space.coeffs(), 2, &mut rng);
        let gm = Matrix::Quadratic(g);
        let mu_g = cartan(&GroupElement::new(gm.clone(), fam.group().clone()).unwrap()).unwrap().norm();
        let phi = incl.conjugate(&gm).unwrap();
        let rep = stability_scan(pres, &incl, &phi, 3, None).unwrap();
        assert!(rep.c_hat <= 2.0 * mu_g + 1e-9, "{} vs {}", rep.c_hat, mu_g);
        assert!(rep.rows.iter().all(|r| r.deviation <= 2.0 * mu_g + 1e-9));
    }
}

#[test]
fn larger_cutoff_never_raises_slope() {
    let fam = catalog::bending_amalgam().unwrap();
    let pres = &fam.presentation;
    let rep = stability_scan(pres, &pres.inclusion(), &bend(&fam, 0.1).unwrap(), 3, None).unwrap();
    let mut last = f64::INFINITY;
    for rho in [rep.rho0, rep.rho0 + 2.0, rep.rho0 + 5.0] {
        let (e, _) = rep.refit(rho);
        assert!(e <= last + 1e-12);
        last = e;
    }
}

#[test]
fn seminorm_equivalence_on_random_vectors() {
    let samples = sl_axis_samples(3, &[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]).unwrap();
    let g = samples[0].1.group().clone();
    let d = delta_l_constants(&samples, &g).unwrap();
    assert!(d.c >= 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect();
        assert!(d.equivalence_holds(&v, 1e-9));
    }
}

#[test]
fn schottky_in_so21_is_proper_against_u11() {
    let cone = mu_cone(&catalog::u11_axis_samples().unwrap()).unwrap();
    let rep = properness_scan(&catalog::properness_so21().unwrap(), 3, &cone, None).unwrap();
    assert!(rep.slope.is_some_and(|s| s > 0.0), "{:?}", rep.slope);
    assert!(rep.positive());
}

#[test]
fn control_inside_u11_has_zero_slope() {
    let cone = mu_cone(&catalog::u11_axis_samples().unwrap()).unwrap();
    let rep = properness_scan(&catalog::properness_control().unwrap(), 3, &cone, None).unwrap();
    assert!(rep.raw_slope.abs() <= 1e-9, "{}", rep.raw_slope);
}

#[test]
fn origin_cone_distance_is_the_norm() {
    assert_eq!(MuCone::origin().distance(&[3.0, 4.0]), 5.0);
}
