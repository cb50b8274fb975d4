use super::*;
use crate::linalg::{int, qmat_from_ints, rat};

fn q3() -> FieldDesc {
    FieldDesc::padic(3).unwrap()
}

#[test]
fn real_distance_extremes() {
    let a = ProjPoint::real(vec![1.0, 1.0]).unwrap();
    let b = ProjPoint::real(vec![1.0, -1.0]).unwrap();
    assert_eq!(proj_distance(&a, &b).unwrap(), 2.0);
    let c = ProjPoint::real(vec![-2.0, -2.0]).unwrap();
    assert_eq!(proj_distance(&a, &c).unwrap(), 0.0);
}

#[test]
fn padic_distance_is_wedge() {
    let a = ProjPoint::padic(3, vec![int(1), int(0)]).unwrap();
    let b = ProjPoint::padic(3, vec![int(1), int(9)]).unwrap();
    assert_eq!(proj_distance(&a, &b).unwrap(), 1.0 / 9.0);
    let c = ProjPoint::padic(3, vec![int(0), int(1)]).unwrap();
    assert_eq!(proj_distance(&a, &c).unwrap(), 1.0);
}

#[test]
fn complex_phase_is_quotiented() {
    let i = Complex64::new(0.0, 1.0);
    let a = ProjPoint::complex(vec![Complex64::new(1.0, 0.0), i]).unwrap();
    let b = ProjPoint::complex(vec![i, Complex64::new(-1.0, 0.0)]).unwrap();
    assert!(proj_distance(&a, &b).unwrap() < 1e-12);
}

#[test]
fn hyperplane_distance_aligned() {
    let f = FieldDesc::real();
    let h = ProjHyperplane::coordinate(&f, 3, 0);
    let x = ProjPoint::real(vec![0.25, 1.0, -0.5]).unwrap();
    assert!((hyperplane_distance(&x, &h).unwrap() - 0.25).abs() < 1e-12);
    let hp = ProjHyperplane::coordinate(&q3(), 2, 0);
    let xp = ProjPoint::padic(3, vec![int(3), int(1)]).unwrap();
    assert_eq!(hyperplane_distance(&xp, &hp).unwrap(), 1.0 / 3.0);
}

#[test]
fn real_proximal_diagonal() {
    let g = Matrix::Real(DMatrix::from_row_slice(3, 3, &[4.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5]));
    let v = proximal_analyze(&g, &FieldDesc::real()).unwrap();
    let d = v.data().unwrap();
    assert!((d.lambda.to_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!(coordinate_aligned(&d.x_plus, &d.x_minus) == Some(0));
    let rot = Matrix::Real(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    assert_eq!(proximal_analyze(&rot, &FieldDesc::real()).unwrap(), ProximalVerdict::NotProximal);
}

#[test]
fn padic_proximal_exact_root() {
    let g = Matrix::Rational(ExactMat::diag(vec![rat(1, 9), int(9)]));
    let d = proximal_analyze(&g, &q3()).unwrap();
    let d = d.data().unwrap();
    assert!(d.exact);
    assert_eq!(d.lambda, Scalar::Rational(rat(1, 9)));
    assert_eq!(d.gap_ratio, 3f64.powi(-4));
    let units = Matrix::Rational(qmat_from_ints(&[&[2, 1], &[1, 1]]));
    assert_eq!(proximal_analyze(&units, &q3()).unwrap(), ProximalVerdict::NotProximal);
}

#[test]
fn padic_proximal_hensel_root() {
    // char poly X² − X/3 + 1
    let g = Matrix::Rational(QMat::from_rows(vec![vec![int(0), int(-1)], vec![int(1), rat(1, 3)]]).unwrap());
    let v = proximal_analyze(&g, &q3()).unwrap();
    let d = v.data().unwrap();
    assert!(!d.exact);
    let gx = apply(&g, &d.x_plus).unwrap();
    assert!(proj_distance(&gx, &d.x_plus).unwrap() <= 3f64.powi(-30));
}

#[test]
fn floor_exponent_at_powers() {
    assert_eq!(padic_floor_exp(3, 1.0 / 9.0), 2);
    assert_eq!(padic_floor_exp(3, 0.1), 2);
    assert_eq!(padic_floor_exp(2, 0.25), 2);
    assert_eq!(padic_floor_exp(5, 0.3), 0);
}

#[test]
fn sandwich_aligned_real() {
    let f = FieldDesc::real();
    let z = |l: f64| Matrix::Real(DMatrix::from_row_slice(3, 3, &[l, 0.0, 0.0, 0.0, 0.001, 0.0, 0.0, 0.0, 0.001]));
    let k = Matrix::Real(DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]));
    let rep = product_sandwich_check(&[z(10.0), z(20.0)], &[k], 0.1, &f, SampleGrid::default()).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.r_eps_exact);
}

#[test]
fn sandwich_rejects_non_isometry() {
    let f = FieldDesc::real();
    let z = Matrix::Real(DMatrix::from_row_slice(2, 2, &[10.0, 0.0, 0.0, 0.001]));
    let k = Matrix::Real(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]));
    let err = product_sandwich_check(&[z.clone(), z], &[k], 0.1, &f, SampleGrid::default()).unwrap_err();
    assert!(matches!(err, Error::Precondition(ref m) if m.contains("k[2]")));
}
