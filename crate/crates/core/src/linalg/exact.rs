//! Dense matrices over exact fields (ℚ and ℚ(√r)).

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fields::val_p;

/// Exact field arithmetic on owned values.
pub trait ExactField:
    Clone
    + Debug
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
}

impl<T> ExactField for T where
    T: Clone
        + Debug
        + PartialEq
        + Eq
        + Hash
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Send
        + Sync
{
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: ExactField> ExactMat<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        ExactMat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(ExactMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diag(d: Vec<T>) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.into_iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: ExactField>(&self, f: impl Fn(&T) -> U) -> ExactMat<U> {
        ExactMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let t = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = t;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + rhs[(i, j)].clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - rhs[(i, j)].clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = T::one() / m[(r, c)].clone();
            for j in c..m.cols {
                let t = m[(r, j)].clone() * inv.clone();
                m[(r, j)] = t;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let t = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self·x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return T::zero();
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() / piv.clone();
                for j in c..n {
                    let t = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> T {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone()).det()
    }

    /// Matrix of `i₀ × i₀` minors, rows and columns indexed by sorted subsets in lex order.
    pub fn compound(&self, k: usize) -> Self {
        let rs = subsets(self.rows, k);
        let cs = subsets(self.cols, k);
        Self::from_fn(rs.len(), cs.len(), |i, j| self.minor(&rs[i], &cs[j]))
    }

    /// Characteristic polynomial `det(X·I − self)`, coefficients from the constant term up.
    pub fn char_poly(&self) -> Vec<T> {
        // Faddeev–LeVerrier: M_k = A·M_{k−1} + c_{n−k+1}·I, c_{n−k} = −tr(A·M_k)/k
        let n = self.rows;
        let mut coeffs = vec![T::zero(); n + 1];
        coeffs[n] = T::one();
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            let mut next = self.mul(&m);
            for i in 0..n {
                let t = next[(i, i)].clone() + coeffs[n - k + 1].clone();
                next[(i, i)] = t;
            }
            m = next;
            let am = self.mul(&m);
            let kk = (0..k).fold(T::zero(), |acc, _| acc + T::one());
            coeffs[n - k] = -(am.trace() / kk);
        }
        coeffs
    }
}

impl<T> std::ops::Index<(usize, usize)> for ExactMat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for ExactMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// All `k`-element subsets of `0..n`, each sorted, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

pub type QMat = ExactMat<BigRational>;

pub fn qmat_from_ints(rows: &[&[i64]]) -> QMat {
    let data: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    ExactMat::from_rows(data).expect("rectangular literal")
}

/// Smith form of a rational matrix over the local ring ℤ_(p).
#[derive(Clone, Debug)]
pub struct LocalSmith {
    /// Invariant-factor valuations, nondecreasing; `None` marks a zero factor.
    pub exponents: Vec<Option<i64>>,
    /// `u` and `v` are invertible over ℤ_(p) with `u·m·v` diagonal.
    pub u: QMat,
    pub v: QMat,
    pub diagonal: QMat,
}

/// Diagonalizes `m` by row and column operations invertible over ℤ_(p).
///
/// Each step moves an entry of minimal valuation to the pivot; all other
/// entries of its row and column are then multiples of it in ℤ_(p).
pub fn smith_local(m: &QMat, p: u64) -> LocalSmith {
    let (r, c) = (m.nrows(), m.ncols());
    let mut d = m.clone();
    let mut u = QMat::identity(r);
    let mut v = QMat::identity(c);
    let mut exps = Vec::new();
    for k in 0..r.min(c) {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..r {
            for j in k..c {
                if let Some(w) = val_p(&d[(i, j)], p) {
                    if best.is_none_or(|(bw, _, _)| w < bw) {
                        best = Some((w, i, j));
                    }
                }
            }
        }
        let Some((w, bi, bj)) = best else {
            exps.extend(std::iter::repeat_n(None, r.min(c) - k));
            break;
        };
        d.swap_rows(k, bi);
        u.swap_rows(k, bi);
        d.swap_cols(k, bj);
        v.swap_cols(k, bj);
        let piv = d[(k, k)].clone();
        for i in k + 1..r {
            if d[(i, k)].is_zero() {
                continue;
            }
            let f = d[(i, k)].clone() / piv.clone();
            for j in 0..c {
                let t = d[(i, j)].clone() - f.clone() * d[(k, j)].clone();
                d[(i, j)] = t;
            }
            for j in 0..r {
                let t = u[(i, j)].clone() - f.clone() * u[(k, j)].clone();
                u[(i, j)] = t;
            }
        }
        for j in k + 1..c {
            if d[(k, j)].is_zero() {
                continue;
            }
            let f = d[(k, j)].clone() / piv.clone();
            for i in 0..r {
                let t = d[(i, j)].clone() - f.clone() * d[(i, k)].clone();
                d[(i, j)] = t;
            }
            for i in 0..c {
                let t = v[(i, j)].clone() - f.clone() * v[(i, k)].clone();
                v[(i, j)] = t;
            }
        }
        exps.push(Some(w));
    }
    LocalSmith { exponents: exps, u, v, diagonal: d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::QuadNum;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn inverse_and_det() {
        let m = qmat_from_ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det(), q(18, 1));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let sing = qmat_from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.inverse(), Err(Error::Singular));
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = qmat_from_ints(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let col = QMat::from_vec(4, 1, v);
            assert!(m.mul(&col).is_zero());
        }
    }

    #[test]
    fn char_poly_companion() {
        // companion of X² − 3X + 2
        let m = qmat_from_ints(&[&[0, -2], &[1, 3]]);
        assert_eq!(m.char_poly(), vec![q(2, 1), q(-3, 1), q(1, 1)]);
        let d = qmat_from_ints(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]);
        assert_eq!(d.char_poly(), vec![q(-30, 1), q(31, 1), q(-10, 1), q(1, 1)]);
    }

    #[test]
    fn compound_of_diagonal() {
        let d = qmat_from_ints(&[&[4, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let c = d.compound(2);
        assert_eq!(c.nrows(), 3);
        assert_eq!(c[(0, 0)], q(4, 1));
        assert_eq!(c[(2, 2)], q(1, 1));
    }

    #[test]
    fn smith_local_diag() {
        // 3·diag(3, 1/3) = diag(9, 1): invariant valuations 0, 2
        let m = qmat_from_ints(&[&[9, 0], &[0, 1]]);
        let s = smith_local(&m, 3);
        assert_eq!(s.exponents, vec![Some(0), Some(2)]);
        assert_eq!(s.u.mul(&m).mul(&s.v), s.diagonal);
        assert_eq!(val_p(&s.u.det(), 3), Some(0));
        assert_eq!(val_p(&s.v.det(), 3), Some(0));
    }

    #[test]
    fn smith_local_generic() {
        let m = qmat_from_ints(&[&[1, 1], &[3, 4]]);
        let s = smith_local(&m, 3);
        assert_eq!(s.exponents, vec![Some(0), Some(0)]);
        let m = ExactMat::from_rows(vec![vec![q(3, 2), q(6, 1)], vec![q(1, 9), q(2, 1)]]).unwrap();
        let s = smith_local(&m, 3);
        // total valuation equals ω(det) = ω(3 − 2/3) = ω(7/3) = −1
        let tot: i64 = s.exponents.iter().map(|e| e.unwrap()).sum();
        assert_eq!(tot, -1);
        assert_eq!(s.exponents[0], Some(-2));
        assert_eq!(s.u.mul(&m).mul(&s.v), s.diagonal);
    }

    #[test]
    fn quadratic_entries() {
        let s2 = QuadNum::sqrt_r(2);
        let one = QuadNum::one();
        let m = ExactMat::from_rows(vec![vec![s2.clone(), one.clone()], vec![one.clone(), s2.clone()]])
            .unwrap();
        assert_eq!(m.det(), one.clone());
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
    }
}
