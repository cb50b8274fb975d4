//! Seeded random group elements and generators of hypothesis-satisfying instances.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cartan::{GroupDesc, GroupElement};
use crate::error::Result;
use crate::fields::FieldDesc;
use crate::linalg::{int, rat, ExactField, ExactMat, Matrix, QMat};
use crate::projective::aligned_block;

/// Uniform entries in `[−2, 2]`, rescaled to determinant one.
pub fn random_sl_real<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let mut m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0));
        let det = m.determinant();
        if det.abs() < 1e-2 {
            continue;
        }
        if det < 0.0 {
            m.row_mut(0).neg_mut();
        }
        let s = det.abs().powf(-1.0 / n as f64);
        return m * s;
    }
}

pub fn random_sl_real_element<R: Rng>(n: usize, rng: &mut R) -> GroupElement {
    let g = GroupDesc::sl(n, FieldDesc::real()).expect("n ≥ 1");
    GroupElement::new_unchecked(Matrix::Real(random_sl_real(n, rng)), g)
}

/// A product of `len` elementary and torus factors with entries in `ℤ[1/p]`.
pub fn random_sl_padic<R: Rng>(n: usize, p: u64, len: usize, rng: &mut R) -> QMat {
    let p = p as i64;
    let mut m = QMat::identity(n);
    for _ in 0..len {
        let f = if n > 1 && rng.gen_bool(0.75) {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let e: i32 = rng.gen_range(-2..=2);
            let c = rng.gen_range(-(p - 1)..=(p - 1)).max(1);
            let mut f = QMat::identity(n);
            f[(i, j)] = int(c) * pow_p(p, e);
            f
        } else if n > 1 {
            let i = rng.gen_range(0..n - 1);
            let e: i32 = rng.gen_range(-2..=2);
            let mut f = QMat::identity(n);
            f[(i, i)] = pow_p(p, e);
            f[(i + 1, i + 1)] = pow_p(p, -e);
            f
        } else {
            QMat::identity(n)
        };
        m = m.mul(&f);
    }
    m
}

fn pow_p(p: i64, e: i32) -> BigRational {
    let base = int(p);
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        BigRational::one() / num_traits::pow(base, (-e) as usize)
    }
}

/// Random element of `SO(J)` as the Cayley transform `(I − X)⁻¹(I + X)` of
/// `X = Σ c_ij (J_jj E_ij − J_ii E_ji)`, exact over any exact field.
pub fn random_so_cayley<T, R>(form: &[T], scale: i64, rng: &mut R) -> ExactMat<T>
where
    T: ExactField + From<BigRational>,
    R: Rng,
{
    let n = form.len();
    loop {
        let mut x = ExactMat::<T>::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let c = T::from(rat(rng.gen_range(-scale..=scale), rng.gen_range(1..=scale.max(1))));
                x[(i, j)] = c.clone() * form[j].clone();
                x[(j, i)] = -(c * form[i].clone());
            }
        }
        let id = ExactMat::<T>::identity(n);
        if let Ok(inv) = id.sub(&x).inverse() {
            let g = inv.mul(&id.add(&x));
            if !g.is_identity() {
                return g;
            }
        }
    }
}

/// A hypothesis-satisfying input for the product contraction check.
#[derive(Clone, Debug)]
pub struct SandwichInstance {
    pub z: Vec<Matrix>,
    pub k: Vec<Matrix>,
    pub eps: f64,
    pub field: FieldDesc,
}

/// Real instance: `z_i = diag(λ_i, B_i)` with `‖B_i‖ ≤ 0.9·|λ_i|ε²`, and `k_i`
/// signed permutations sending `e₁` to `±e₁`.
pub fn sandwich_instance_real<R: Rng>(dim: usize, n: usize, eps: f64, rng: &mut R) -> SandwichInstance {
    let z = (0..n)
        .map(|_| {
            let lam: f64 = rng.gen_range(2.0..1000.0) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            let mut b = DMatrix::<f64>::from_fn(dim - 1, dim - 1, |_, _| rng.gen_range(-1.0..1.0));
            let norm = (0..dim - 1).map(|i| b.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
            let target = 0.9 * lam.abs() * eps * eps * rng.gen_range(0.01..1.0);
            b *= target / norm.max(1e-300);
            let mut m = DMatrix::zeros(dim, dim);
            m[(0, 0)] = lam;
            m.view_mut((1, 1), (dim - 1, dim - 1)).copy_from(&b);
            Matrix::Real(m)
        })
        .collect();
    let k = (1..n)
        .map(|_| {
            let mut perm: Vec<usize> = (1..dim).collect();
            perm.shuffle(rng);
            let mut m = DMatrix::zeros(dim, dim);
            m[(0, 0)] = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            for (i, &j) in perm.iter().enumerate() {
                m[(i + 1, j)] = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            }
            Matrix::Real(m)
        })
        .collect();
    SandwichInstance { z, k, eps, field: FieldDesc::real() }
}

/// p-adic instance with `ε = p⁻²`: `z_i = diag(u·p^{−5}, B_i)` with entries of
/// `B_i` of valuation ≥ −1, and `k_i ∈ GL_n(ℤ_p)` with a unit `(1,1)` entry.
pub fn sandwich_instance_padic<R: Rng>(p: u64, dim: usize, n: usize, rng: &mut R) -> SandwichInstance {
    let pi = p as i64;
    let unit = |rng: &mut R| -> BigRational {
        let mut a = rng.gen_range(1..=3 * pi);
        while a % pi == 0 {
            a += 1;
        }
        let sign = if rng.gen_bool(0.5) { -1 } else { 1 };
        rat(sign * a, 1)
    };
    let z = (0..n)
        .map(|_| {
            let lam = unit(rng) * pow_p(pi, -5);
            let b = QMat::from_fn(dim - 1, dim - 1, |_, _| {
                if rng.gen_bool(0.3) {
                    BigRational::zero()
                } else {
                    int(rng.gen_range(-(pi * pi)..=(pi * pi))) * pow_p(pi, rng.gen_range(-1..=2))
                }
            });
            Matrix::Rational(aligned_block(lam, &b, 0))
        })
        .collect();
    let k = (1..n)
        .map(|_| loop {
            let m = QMat::from_fn(dim, dim, |i, j| {
                if i == 0 && j == 0 {
                    unit(rng)
                } else {
                    int(rng.gen_range(-pi..=pi))
                }
            });
            if crate::fields::val_p(&m.det(), p) == Some(0) {
                break Matrix::Rational(m);
            }
        })
        .collect();
    SandwichInstance { z, k, eps: 1.0 / (p * p) as f64, field: FieldDesc::padic(p).expect("prime") }
}

/// Random rational `(t, ℓ_t)` axis samples `diag(e^t, e^{−t})` padded into `SL_n`, for tests.
pub fn sl_axis_samples(n: usize, ts: &[f64]) -> Result<Vec<(f64, GroupElement)>> {
    let g = GroupDesc::sl(n, FieldDesc::real())?;
    ts.iter()
        .map(|&t| {
            let m = DMatrix::from_fn(n, n, |i, j| match (i, j) {
                (0, 0) => t.exp(),
                (1, 1) => (-t).exp(),
                (i, j) if i == j => 1.0,
                _ => 0.0,
            });
            GroupElement::new(Matrix::Real(m), g.clone()).map(|e| (t, e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cayley_preserves_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let form = vec![int(1), int(1), int(-1), int(-1)];
        let g = random_so_cayley(&form, 3, &mut rng);
        let j = QMat::diag(form);
        assert_eq!(g.transpose().mul(&j).mul(&g), j);
        assert!(g.det().is_one());
    }

    #[test]
    fn padic_products_have_unit_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_sl_padic(3, 3, 12, &mut rng);
        assert!(m.det().is_one());
    }
}
