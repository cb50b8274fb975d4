//! Matrices with exact or floating entries behind one type.

mod exact;

pub use exact::{qmat_from_ints, smith_local, subsets, ExactField, ExactMat, LocalSmith, QMat};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::fields::{rational_to_f64, FieldDesc, FieldKind, QuadNum, Scalar};

pub type QuadMat = ExactMat<QuadNum>;

/// A square matrix over one of the supported scalar kinds.
///
/// Exact kinds multiply exactly; mixing an exact matrix with a floating one
/// yields a floating result.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    Rational(QMat),
    Quadratic(QuadMat),
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl Matrix {
    /// Builds a matrix from scalar rows, choosing the narrowest kind holding every entry.
    pub fn from_scalars(rows: &[Vec<Scalar>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("empty matrix"));
        }
        let c = rows[0].len();
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        let has = |f: fn(&Scalar) -> bool| rows.iter().flatten().any(f);
        if has(|s| matches!(s, Scalar::Complex(_))) {
            let data: Vec<Complex64> = rows.iter().flatten().map(Scalar::to_complex).collect();
            return Ok(Matrix::Complex(DMatrix::from_row_slice(n, c, &data)));
        }
        if has(|s| matches!(s, Scalar::Real(_))) {
            let data = rows.iter().flatten().map(Scalar::to_f64).collect::<Result<Vec<_>>>()?;
            return Ok(Matrix::Real(DMatrix::from_row_slice(n, c, &data)));
        }
        if has(|s| matches!(s, Scalar::Quadratic(_))) {
            let data = rows
                .iter()
                .flatten()
                .map(|s| match s {
                    Scalar::Quadratic(q) => q.clone(),
                    Scalar::Rational(r) => QuadNum::rational(r.clone()),
                    _ => unreachable!(),
                })
                .collect();
            return Ok(Matrix::Quadratic(ExactMat::from_vec(n, c, data)));
        }
        let data = rows.iter().flatten().map(|s| s.as_rational().unwrap().clone()).collect();
        Ok(Matrix::Rational(ExactMat::from_vec(n, c, data)))
    }

    pub fn identity(n: usize) -> Self {
        Matrix::Rational(QMat::identity(n))
    }

    pub fn nrows(&self) -> usize {
        match self {
            Matrix::Rational(m) => m.nrows(),
            Matrix::Quadratic(m) => m.nrows(),
            Matrix::Real(m) => m.nrows(),
            Matrix::Complex(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Matrix::Rational(m) => m.ncols(),
            Matrix::Quadratic(m) => m.ncols(),
            Matrix::Real(m) => m.ncols(),
            Matrix::Complex(m) => m.ncols(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Matrix::Rational(_) | Matrix::Quadratic(_))
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        match self {
            Matrix::Rational(m) => Scalar::Rational(m[(i, j)].clone()),
            Matrix::Quadratic(m) => {
                let q = &m[(i, j)];
                if q.is_rational() {
                    Scalar::Rational(q.a().clone())
                } else {
                    Scalar::Quadratic(q.clone())
                }
            }
            Matrix::Real(m) => Scalar::Real(m[(i, j)]),
            Matrix::Complex(m) => Scalar::Complex(m[(i, j)]),
        }
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.nrows()).map(|i| (0..self.ncols()).map(|j| self.entry(i, j)).collect()).collect()
    }

    pub fn to_quadratic(m: &QMat) -> QuadMat {
        m.map(|x| QuadNum::rational(x.clone()))
    }

    /// Real matrix in double precision; complex matrices are rejected.
    pub fn to_real(&self) -> Result<DMatrix<f64>> {
        Ok(match self {
            Matrix::Rational(m) => {
                DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| rational_to_f64(&m[(i, j)]))
            }
            Matrix::Quadratic(m) => DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].to_f64()),
            Matrix::Real(m) => m.clone(),
            Matrix::Complex(_) => return Err(Error::invalid("complex matrix has no real form")),
        })
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            Matrix::Complex(m) => m.clone(),
            other => other.to_real().expect("non-complex").map(|x| Complex64::new(x, 0.0)),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Matrix::Complex(_))
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::DimensionMismatch { expected: self.ncols(), got: rhs.nrows() });
        }
        Ok(match (self, rhs) {
            (Matrix::Rational(a), Matrix::Rational(b)) => Matrix::Rational(a.mul(b)),
            (Matrix::Quadratic(a), Matrix::Quadratic(b)) => Matrix::Quadratic(a.mul(b)),
            (Matrix::Rational(a), Matrix::Quadratic(b)) => {
                Matrix::Quadratic(Self::to_quadratic(a).mul(b))
            }
            (Matrix::Quadratic(a), Matrix::Rational(b)) => {
                Matrix::Quadratic(a.mul(&Self::to_quadratic(b)))
            }
            (a, b) if a.is_complex() || b.is_complex() => {
                Matrix::Complex(a.to_complex() * b.to_complex())
            }
            (a, b) => Matrix::Real(a.to_real()? * b.to_real()?),
        })
    }

    pub fn inverse(&self) -> Result<Matrix> {
        Ok(match self {
            Matrix::Rational(m) => Matrix::Rational(m.inverse()?),
            Matrix::Quadratic(m) => Matrix::Quadratic(m.inverse()?),
            Matrix::Real(m) => Matrix::Real(m.clone().try_inverse().ok_or(Error::Singular)?),
            Matrix::Complex(m) => Matrix::Complex(m.clone().try_inverse().ok_or(Error::Singular)?),
        })
    }

    pub fn det(&self) -> Scalar {
        match self {
            Matrix::Rational(m) => Scalar::Rational(m.det()),
            Matrix::Quadratic(m) => Scalar::Quadratic(m.det()),
            Matrix::Real(m) => Scalar::Real(m.determinant()),
            Matrix::Complex(m) => Scalar::Complex(m.determinant()),
        }
    }

    pub fn transpose(&self) -> Matrix {
        match self {
            Matrix::Rational(m) => Matrix::Rational(m.transpose()),
            Matrix::Quadratic(m) => Matrix::Quadratic(m.transpose()),
            Matrix::Real(m) => Matrix::Real(m.transpose()),
            Matrix::Complex(m) => Matrix::Complex(m.transpose()),
        }
    }

    /// Conjugate transpose (plain transpose for real kinds).
    pub fn adjoint(&self) -> Matrix {
        match self {
            Matrix::Complex(m) => Matrix::Complex(m.adjoint()),
            other => other.transpose(),
        }
    }

    /// Largest entry modulus of `self − other`, computed in double precision.
    pub fn sup_dist(&self, other: &Matrix) -> f64 {
        let a = self.to_complex();
        let b = other.to_complex();
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Exact identity test, or sup-distance ≤ `tol` for floating kinds.
    pub fn is_identity(&self, tol: f64) -> bool {
        match self {
            Matrix::Rational(m) => m.is_identity(),
            Matrix::Quadratic(m) => m.is_identity(),
            _ => self.sup_dist(&Matrix::identity(self.nrows())) <= tol,
        }
    }

    /// Exact equality for exact kinds (rational entries compare equal across kinds).
    pub fn exact_eq(&self, other: &Matrix) -> Option<bool> {
        match (self, other) {
            (Matrix::Rational(a), Matrix::Rational(b)) => Some(a == b),
            (Matrix::Quadratic(a), Matrix::Quadratic(b)) => Some(a == b),
            (Matrix::Rational(a), Matrix::Quadratic(b)) | (Matrix::Quadratic(b), Matrix::Rational(a)) => {
                Some(&Self::to_quadratic(a) == b)
            }
            _ => None,
        }
    }

    /// Whether every entry is finite.
    pub fn is_finite(&self) -> bool {
        match self {
            Matrix::Real(m) => m.iter().all(|x| x.is_finite()),
            Matrix::Complex(m) => m.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            _ => true,
        }
    }

    /// Errors when the storage kind cannot hold elements of `field`.
    pub fn check_field(&self, field: &FieldDesc) -> Result<()> {
        let ok = match (field.kind(), self) {
            (FieldKind::Padic { .. }, Matrix::Rational(_)) => true,
            (FieldKind::Padic { .. }, _) => false,
            (FieldKind::Quadratic { r }, Matrix::Quadratic(m)) => {
                m.entries().iter().all(|x| x.is_rational() || x.radicand() == r)
            }
            (FieldKind::Quadratic { .. }, Matrix::Rational(_)) => true,
            (FieldKind::Quadratic { .. }, _) => false,
            (FieldKind::Real, Matrix::Complex(_)) => false,
            (FieldKind::Real, _) | (FieldKind::Complex, _) => true,
            (FieldKind::LaurentSeries { .. }, _) => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("matrix entries do not belong to {field}")))
        }
    }
}

/// Rational `n/d` as a `BigRational`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Integer as a `BigRational`.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn rational_matrix(rows: &[&[(i64, i64)]]) -> Matrix {
    let data = rows.iter().map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect()).collect();
    Matrix::Rational(ExactMat::from_rows(data).expect("rectangular literal"))
}

/// Operator 2-norm (largest singular value).
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn singular_values_complex(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_products_promote() {
        let a = rational_matrix(&[&[(2, 1), (0, 1)], &[(0, 1), (1, 2)]]);
        let s2 = QuadNum::sqrt_r(2);
        let b = Matrix::Quadratic(QuadMat::diag(vec![s2.clone(), s2.clone()]));
        let ab = a.mul(&b).unwrap();
        assert!(matches!(ab, Matrix::Quadratic(_)));
        let r = Matrix::Real(DMatrix::identity(2, 2));
        assert!(matches!(a.mul(&r).unwrap(), Matrix::Real(_)));
    }

    #[test]
    fn singular_values_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let s = singular_values(&m);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((s[0] - phi).abs() < 1e-14);
        assert!((s[1] - 1.0 / phi).abs() < 1e-14);
    }
}
