use cartanlab::cartan::{cartan, GroupDesc, GroupElement};
use cartanlab::fields::FieldDesc;
use cartanlab::linalg::{int, Matrix, QMat};
use nalgebra::DMatrix;
use num_rational::BigRational;
use proptest::prelude::*;

fn pow3(k: i32) -> BigRational {
    let b = BigRational::from_integer(3.into());
    if k >= 0 {
        num_traits::pow(b, k as usize)
    } else {
        num_traits::pow(b, (-k) as usize).recip()
    }
}

proptest! {
    #[test]
    fn real_projection_is_sorted_and_balanced(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0) {
        // [[1, a], [b, 1 + ab]] has determinant 1; scale the first row by e^c and the second by e^-c
        let m = DMatrix::from_row_slice(2, 2, &[c.exp(), c.exp() * a, (-c).exp() * b, (-c).exp() * (1.0 + a * b)]);
        let g = GroupElement::new(Matrix::Real(m), GroupDesc::sl(2, FieldDesc::real()).unwrap()).unwrap();
        let mu = cartan(&g).unwrap();
        prop_assert!(mu.coords[0] >= mu.coords[1]);
        prop_assert!((mu.coords[0] + mu.coords[1]).abs() < 1e-9 * (1.0 + mu.coords[0].abs()));
    }

    #[test]
    fn padic_diagonal_reads_valuations(k in -6i32..6, j in -6i32..6) {
        let d = QMat::diag(vec![pow3(k), pow3(j), pow3(-k - j)]);
        let g = GroupElement::new(Matrix::Rational(d), GroupDesc::sl(3, FieldDesc::padic(3).unwrap()).unwrap()).unwrap();
        let mut want = vec![-k as i64, -j as i64, (k + j) as i64];
        want.sort_unstable_by(|x, y| y.cmp(x));
        prop_assert_eq!(cartan(&g).unwrap().lattice, Some(want));
    }

    #[test]
    fn integral_matrices_have_zero_projection(u in -200i64..200, v in -200i64..200) {
        // [[u, 1], [uv - 1, v]] lies in SL2(Z), hence in the maximal compact
        let m = QMat::from_rows(vec![vec![int(u), int(1)], vec![int(u * v - 1), int(v)]]).unwrap();
        let g = GroupElement::new(Matrix::Rational(m), GroupDesc::sl(2, FieldDesc::padic(3).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(cartan(&g).unwrap().lattice, Some(vec![0, 0]));
    }
}
