//! Group descriptors and Cartan projections.
//!
//! Over ℝ and ℂ the projection of `g ∈ SL_n` is the descending vector of log
//! singular values. Over ℚ_p it is read off the Smith form over ℤ_(p): if
//! `e₁ ≤ … ≤ e_n` are the invariant-factor valuations of `g`, then
//! `μ(g) = (−e₁, …, −e_n)`, an integer vector in log-`p` units.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{val_p, FieldDesc, QuadNum, Scalar};
use crate::linalg::{
    op_norm, singular_values, singular_values_complex, smith_local, subsets, ExactMat, Matrix,
    QMat, QuadMat,
};

/// Floating tolerance for membership tests (`det = 1`, form preservation).
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Sl { n: usize },
    So { p: usize, q: usize },
    U { p: usize, q: usize },
}

/// Shape of the closed Weyl chamber a Cartan vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Chamber {
    /// `x₁ ≥ … ≥ x_n`, `Σ x_i = 0`.
    TypeA,
    /// `x₁ ≥ … ≥ x_r ≥ 0`.
    TypeBc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupDesc {
    family: Family,
    field: FieldDesc,
    form: Vec<Scalar>,
}

impl GroupDesc {
    pub fn sl(n: usize, field: FieldDesc) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("SL(0)"));
        }
        Ok(GroupDesc { family: Family::Sl { n }, field, form: Vec::new() })
    }

    /// `SO(p, q)` preserving `x₁² + … + x_p² − x_{p+1}² − … − x_{p+q}²`.
    pub fn so(p: usize, q: usize, field: FieldDesc) -> Result<Self> {
        let form = standard_form(p, q);
        Self::so_with_form(p, q, field, form)
    }

    /// `SO(p, q)` of an arbitrary diagonal form whose real signature is `(p, q)`.
    pub fn so_with_form(p: usize, q: usize, field: FieldDesc, form: Vec<Scalar>) -> Result<Self> {
        if !field.is_archimedean() {
            return Err(Error::unsupported(format!("SO(p,q) over {field}")));
        }
        check_signature(p, q, &form)?;
        Ok(GroupDesc { family: Family::So { p, q }, field, form })
    }

    /// `U(p, q)` preserving `|z₁|² + … + |z_p|² − … − |z_{p+q}|²`.
    pub fn u(p: usize, q: usize) -> Result<Self> {
        Ok(GroupDesc {
            family: Family::U { p, q },
            field: FieldDesc::complex(),
            form: standard_form(p, q),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn form(&self) -> &[Scalar] {
        &self.form
    }

    /// Matrix size.
    pub fn size(&self) -> usize {
        match self.family {
            Family::Sl { n } => n,
            Family::So { p, q } | Family::U { p, q } => p + q,
        }
    }

    /// Real rank.
    pub fn rank(&self) -> usize {
        match self.family {
            Family::Sl { n } => n - 1,
            Family::So { p, q } | Family::U { p, q } => p.min(q),
        }
    }

    pub fn chamber(&self) -> Chamber {
        match self.family {
            Family::Sl { .. } => Chamber::TypeA,
            _ => Chamber::TypeBc,
        }
    }

    /// Number of Cartan coordinates.
    pub fn cartan_dim(&self) -> usize {
        match self.family {
            Family::Sl { n } => n,
            _ => self.rank(),
        }
    }

    /// Diagonal form matrix `J` (identity for `SL_n`).
    pub fn form_matrix(&self) -> Matrix {
        if self.form.is_empty() {
            return Matrix::identity(self.size());
        }
        let n = self.form.len();
        let rows: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                (0..n).map(|j| if i == j { self.form[i].clone() } else { Scalar::int(0) }).collect()
            })
            .collect();
        Matrix::from_scalars(&rows).expect("diagonal form")
    }

    pub fn has_standard_form(&self) -> bool {
        self.form.iter().all(|s| {
            s.to_f64().map(|x| x == 1.0 || x == -1.0).unwrap_or(false) && s.is_exact()
        })
    }
}

fn standard_form(p: usize, q: usize) -> Vec<Scalar> {
    std::iter::repeat_n(Scalar::int(1), p).chain(std::iter::repeat_n(Scalar::int(-1), q)).collect()
}

fn check_signature(p: usize, q: usize, form: &[Scalar]) -> Result<()> {
    if form.len() != p + q {
        return Err(Error::DimensionMismatch { expected: p + q, got: form.len() });
    }
    let mut pos = 0;
    let mut neg = 0;
    for c in form {
        let s = match c {
            Scalar::Quadratic(x) => x.signum() as f64,
            other => other.to_f64()?,
        };
        if s > 0.0 {
            pos += 1;
        } else if s < 0.0 {
            neg += 1;
        } else {
            return Err(Error::invalid("zero form coefficient"));
        }
    }
    if (pos, neg) != (p, q) {
        return Err(Error::invalid(format!("form signature ({pos},{neg}) differs from ({p},{q})")));
    }
    Ok(())
}

/// A matrix together with the group it is asserted to lie in.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    matrix: Matrix,
    group: GroupDesc,
}

impl GroupElement {
    /// Validates size, field, determinant and form preservation.
    pub fn new(matrix: Matrix, group: GroupDesc) -> Result<Self> {
        let n = group.size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
        }
        matrix.check_field(&group.field)?;
        if !matrix.is_finite() {
            return Err(Error::numerical("non-finite matrix entry"));
        }
        let g = GroupElement { matrix, group };
        g.check_membership()?;
        Ok(g)
    }

    /// Skips validation; for products of validated elements.
    pub fn new_unchecked(matrix: Matrix, group: GroupDesc) -> Self {
        GroupElement { matrix, group }
    }

    pub fn identity(group: &GroupDesc) -> Self {
        GroupElement { matrix: Matrix::identity(group.size()), group: group.clone() }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn group(&self) -> &GroupDesc {
        &self.group
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn mul(&self, rhs: &GroupElement) -> Result<GroupElement> {
        Ok(GroupElement { matrix: self.matrix.mul(&rhs.matrix)?, group: self.group.clone() })
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        Ok(GroupElement { matrix: self.matrix.inverse()?, group: self.group.clone() })
    }

    fn check_membership(&self) -> Result<()> {
        let scale = self.matrix.to_complex().iter().map(|z| z.norm()).fold(1.0, f64::max);
        let det = self.matrix.det();
        let det_ok = match (&self.group.family, &det) {
            (Family::U { .. }, d) => (d.to_complex().norm() - 1.0).abs() <= MEMBERSHIP_TOL,
            (_, Scalar::Rational(d)) => d.is_one(),
            (_, Scalar::Quadratic(d)) => d.is_one(),
            (_, d) => (d.to_complex() - Complex64::new(1.0, 0.0)).norm() <= MEMBERSHIP_TOL,
        };
        if !det_ok {
            return Err(Error::precondition(format!("determinant {det} is not 1")));
        }
        if matches!(self.group.family, Family::Sl { .. }) {
            return Ok(());
        }
        let j = self.group.form_matrix();
        let lhs = self.matrix.adjoint().mul(&j)?.mul(&self.matrix)?;
        let ok = match lhs.exact_eq(&j) {
            Some(b) => b,
            None => lhs.sup_dist(&j) <= MEMBERSHIP_TOL * scale * scale,
        };
        if !ok {
            return Err(Error::precondition("matrix does not preserve the invariant form"));
        }
        Ok(())
    }
}

/// A point of the closed positive Weyl chamber.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanVector {
    pub coords: Vec<f64>,
    /// Exact integer coordinates (log-`p` units) for p-adic projections.
    pub lattice: Option<Vec<i64>>,
    pub chamber: Chamber,
}

impl CartanVector {
    pub fn new(coords: Vec<f64>, chamber: Chamber) -> Self {
        CartanVector { coords, lattice: None, chamber }
    }

    pub fn from_lattice(lattice: Vec<i64>) -> Self {
        CartanVector {
            coords: lattice.iter().map(|&x| x as f64).collect(),
            lattice: Some(lattice),
            chamber: Chamber::TypeA,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        mu_norm(self)
    }

    /// Squared norm as an exact integer, for lattice vectors.
    pub fn norm_sq_exact(&self) -> Option<i64> {
        self.lattice.as_ref().map(|v| v.iter().map(|x| x * x).sum())
    }

    /// Euclidean distance between coordinate vectors.
    pub fn dist(&self, other: &CartanVector) -> f64 {
        euclid(&sub(&self.coords, &other.coords))
    }

    /// Whether the chamber inequalities hold up to `tol`.
    pub fn in_chamber(&self, tol: f64) -> bool {
        let sorted = self.coords.windows(2).all(|w| w[0] >= w[1] - tol);
        match self.chamber {
            Chamber::TypeA => {
                let s: f64 = self.coords.iter().sum();
                sorted && s.abs() <= tol * (1.0 + self.norm())
            }
            Chamber::TypeBc => sorted && self.coords.last().is_none_or(|&x| x >= -tol),
        }
    }
}

pub(crate) fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Euclidean norm of the coordinates.
pub fn mu_norm(v: &CartanVector) -> f64 {
    euclid(&v.coords)
}

/// Cartan projection over whatever field `g` lives in.
pub fn cartan(g: &GroupElement) -> Result<CartanVector> {
    if g.group.field.is_archimedean() {
        cartan_archimedean(g)
    } else {
        cartan_padic(g)
    }
}

/// Log singular values: all of them for `SL_n`, the top `min(p, q)` for `SO`/`U`.
pub fn cartan_archimedean(g: &GroupElement) -> Result<CartanVector> {
    let group = &g.group;
    if !group.field.is_archimedean() {
        return Err(Error::unsupported(format!("archimedean projection over {}", group.field)));
    }
    if !g.matrix.is_finite() {
        return Err(Error::numerical("non-finite matrix entry"));
    }
    match group.family {
        Family::Sl { n } => {
            let top = log_singular_values(&g.matrix)?;
            // Small singular values lose relative accuracy when the spread is
            // large; read the lower half off g⁻¹ instead.
            let inv = g.matrix.inverse()?;
            let bottom = log_singular_values(&inv)?;
            let mut coords: Vec<f64> = (0..n)
                .map(|i| if i < n.div_ceil(2) { top[i] } else { -bottom[n - 1 - i] })
                .collect();
            let mean = coords.iter().sum::<f64>() / n as f64;
            if mean.abs() > 1e-6 * (1.0 + euclid(&coords)) {
                return Err(Error::numerical(format!("log singular values sum to {}", mean * n as f64)));
            }
            coords.iter_mut().for_each(|x| *x -= mean);
            sort_desc(&mut coords);
            Ok(CartanVector::new(coords, Chamber::TypeA))
        }
        Family::So { .. } | Family::U { .. } => {
            let m = rescale_to_standard(&g.matrix, &group.form)?;
            // only the top half is needed; the rest are reciprocals and may underflow
            let logs = log_top_singular_values(&m, group.rank())?;
            let mut coords: Vec<f64> = logs[..group.rank()].iter().map(|&x| x.max(0.0)).collect();
            sort_desc(&mut coords);
            Ok(CartanVector::new(coords, Chamber::TypeBc))
        }
    }
}

fn sort_desc(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

fn log_singular_values(m: &Matrix) -> Result<Vec<f64>> {
    log_top_singular_values(m, m.nrows())
}

fn log_top_singular_values(m: &Matrix, k: usize) -> Result<Vec<f64>> {
    let mut s = match m {
        Matrix::Complex(c) => singular_values_complex(c),
        other => singular_values(&other.to_real()?),
    };
    s.truncate(k);
    if s.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Error::numerical(format!("singular values {s:?} are not all positive")));
    }
    Ok(s.into_iter().map(f64::ln).collect())
}

/// Conjugates by `diag(√|J_ii|)` so that the form becomes `diag(±1)`.
fn rescale_to_standard(m: &Matrix, form: &[Scalar]) -> Result<Matrix> {
    if form.iter().all(|c| c.to_f64().map(|x| x.abs() == 1.0).unwrap_or(false)) {
        return Ok(m.clone());
    }
    let s: Vec<f64> = form.iter().map(|c| c.to_f64().map(|x| x.abs().sqrt())).collect::<Result<_>>()?;
    let n = s.len();
    Ok(match m {
        Matrix::Complex(c) => {
            Matrix::Complex(DMatrix::from_fn(n, n, |i, j| c[(i, j)] * (s[i] / s[j])))
        }
        other => {
            let r = other.to_real()?;
            Matrix::Real(DMatrix::from_fn(n, n, |i, j| r[(i, j)] * s[i] / s[j]))
        }
    })
}

fn padic_rational<'a>(g: &'a GroupElement, what: &str) -> Result<(&'a QMat, u64)> {
    let p = g
        .group
        .field
        .prime()
        .ok_or_else(|| Error::unsupported(format!("{what} over {}", g.group.field)))?;
    if !matches!(g.group.family, Family::Sl { .. }) {
        return Err(Error::unsupported(format!("{what} for non-SL groups over Q_{p}")));
    }
    match &g.matrix {
        Matrix::Rational(m) => Ok((m, p)),
        _ => Err(Error::invalid(format!("{what} needs exact rational entries"))),
    }
}

/// Integer Cartan projection over ℚ_p from the Smith form over ℤ_(p).
pub fn cartan_padic(g: &GroupElement) -> Result<CartanVector> {
    let (m, p) = padic_rational(g, "p-adic projection")?;
    let s = smith_local(m, p);
    let coords = s
        .exponents
        .iter()
        .map(|e| e.map(|e| -e).ok_or(Error::Singular))
        .collect::<Result<Vec<i64>>>()?;
    Ok(CartanVector::from_lattice(coords))
}

fn check_i0(g: &GroupDesc, i0: usize) -> Result<usize> {
    match g.family {
        Family::Sl { n } if (1..n).contains(&i0) => Ok(n),
        Family::Sl { n } => Err(Error::invalid(format!("i0 = {i0} outside 1..={}", n - 1))),
        _ => Err(Error::unsupported("weight pairings are defined for SL_n")),
    }
}

/// `⟨ω_{i₀}, v⟩`: the sum of the first `i₀` coordinates.
pub fn weight_pairing(i0: usize, v: &CartanVector) -> Result<f64> {
    if v.chamber != Chamber::TypeA || i0 < 1 || i0 >= v.dim() {
        return Err(Error::invalid(format!("i0 = {i0} out of range for a vector of length {}", v.dim())));
    }
    Ok(v.coords[..i0].iter().sum())
}

/// Exact version of [`weight_pairing`] for lattice vectors.
pub fn weight_pairing_exact(i0: usize, v: &CartanVector) -> Result<i64> {
    let lat = v.lattice.as_ref().ok_or_else(|| Error::invalid("not a lattice vector"))?;
    if i0 < 1 || i0 >= lat.len() {
        return Err(Error::invalid(format!("i0 = {i0} out of range")));
    }
    Ok(lat[..i0].iter().sum())
}

/// Log of the operator norm of `Λ^{i₀} g`.
///
/// Archimedean: natural log of the largest singular value of the compound
/// matrix. ℚ_p: the exponent `max −ω(minor)` over `i₀ × i₀` minors, i.e. the
/// logarithm in base `p`.
pub fn wedge_norm_log(g: &GroupElement, i0: usize) -> Result<f64> {
    check_i0(&g.group, i0)?;
    if !g.group.field.is_archimedean() {
        return wedge_norm_exponent(g, i0).map(|e| e as f64);
    }
    let norm = match &g.matrix {
        Matrix::Rational(m) => op_norm(&to_f64(&m.compound(i0))),
        Matrix::Quadratic(m) => op_norm(&quad_to_f64(&m.compound(i0))),
        Matrix::Real(m) => op_norm(&compound_f64(m, i0)),
        Matrix::Complex(m) => {
            let c = compound_complex(m, i0);
            singular_values_complex(&c)[0]
        }
    };
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::numerical(format!("wedge norm {norm}")));
    }
    Ok(norm.ln())
}

/// Integer exponent `max −ω(minor)` over the `i₀ × i₀` minors of a p-adic element.
pub fn wedge_norm_exponent(g: &GroupElement, i0: usize) -> Result<i64> {
    check_i0(&g.group, i0)?;
    let (m, p) = padic_rational(g, "p-adic wedge norm")?;
    let n = m.nrows();
    let sets = subsets(n, i0);
    let mut best: Option<i64> = None;
    for r in &sets {
        for c in &sets {
            if let Some(w) = val_p(&m.minor(r, c), p) {
                best = Some(best.map_or(-w, |b| b.max(-w)));
            }
        }
    }
    best.ok_or(Error::Singular)
}

fn to_f64(m: &ExactMat<BigRational>) -> DMatrix<f64> {
    Matrix::Rational(m.clone()).to_real().expect("rational")
}

fn quad_to_f64(m: &QuadMat) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| QuadNum::to_f64(&m[(i, j)]))
}

fn compound_f64(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let rs = subsets(m.nrows(), k);
    let cs = subsets(m.ncols(), k);
    DMatrix::from_fn(rs.len(), cs.len(), |i, j| {
        DMatrix::from_fn(k, k, |a, b| m[(rs[i][a], cs[j][b])]).determinant()
    })
}

fn compound_complex(m: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    let rs = subsets(m.nrows(), k);
    let cs = subsets(m.ncols(), k);
    DMatrix::from_fn(rs.len(), cs.len(), |i, j| {
        DMatrix::from_fn(k, k, |a, b| m[(rs[i][a], cs[j][b])]).determinant()
    })
}

/// `‖a‖ ≤ ‖b‖ + ‖c‖` decided exactly from squared integer norms.
pub fn norm_le_sum_exact(a2: i64, b2: i64, c2: i64) -> bool {
    // √a ≤ √b + √c  ⇔  a − b − c ≤ 2√(bc)
    let d = a2 - b2 - c2;
    d <= 0 || (d as i128) * (d as i128) <= 4 * (b2 as i128) * (c2 as i128)
}

/// Lattice difference of two exact Cartan vectors.
pub fn lattice_diff(a: &CartanVector, b: &CartanVector) -> Option<Vec<i64>> {
    let (x, y) = (a.lattice.as_ref()?, b.lattice.as_ref()?);
    Some(x.iter().zip(y).map(|(u, v)| u - v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational_matrix;

    fn sl2r(m: Matrix) -> GroupElement {
        GroupElement::new(m, GroupDesc::sl(2, FieldDesc::real()).unwrap()).unwrap()
    }

    #[test]
    fn unipotent_projection() {
        let g = sl2r(rational_matrix(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]]));
        let mu = cartan_archimedean(&g).unwrap();
        let lphi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((mu.coords[0] - lphi).abs() < 1e-12);
        assert!((mu.coords[1] + lphi).abs() < 1e-12);
        assert!((wedge_norm_log(&g, 1).unwrap() - lphi).abs() < 1e-12);
    }

    #[test]
    fn diagonal_projection() {
        let g = sl2r(rational_matrix(&[&[(2, 1), (0, 1)], &[(0, 1), (1, 2)]]));
        let mu = cartan(&g).unwrap();
        assert!((mu.coords[0] - 2f64.ln()).abs() < 1e-15);
        let id = GroupElement::identity(g.group());
        assert_eq!(cartan(&id).unwrap().coords, vec![0.0, 0.0]);
    }

    #[test]
    fn padic_examples() {
        let f = FieldDesc::padic(3).unwrap();
        let g = GroupDesc::sl(2, f).unwrap();
        let d = GroupElement::new(rational_matrix(&[&[(3, 1), (0, 1)], &[(0, 1), (1, 3)]]), g.clone())
            .unwrap();
        assert_eq!(cartan_padic(&d).unwrap().lattice, Some(vec![1, -1]));
        let u = GroupElement::new(rational_matrix(&[&[(1, 1), (1, 1)], &[(3, 1), (4, 1)]]), g.clone())
            .unwrap();
        assert_eq!(cartan_padic(&u).unwrap().lattice, Some(vec![0, 0]));
        assert_eq!(wedge_norm_exponent(&d, 1).unwrap(), 1);
    }

    #[test]
    fn boost_in_so22() {
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[c, 0.0, s, 0.0, 0.0, 1.0, 0.0, 0.0, s, 0.0, c, 0.0, 0.0, 0.0, 0.0, 1.0],
        );
        let g = GroupElement::new(Matrix::Real(m), GroupDesc::so(2, 2, FieldDesc::real()).unwrap())
            .unwrap();
        let mu = cartan(&g).unwrap();
        assert!((mu.coords[0] - 1.0).abs() < 1e-12);
        assert!(mu.coords[1].abs() < 1e-12);
    }

    #[test]
    fn membership_rejections() {
        let g = GroupDesc::sl(2, FieldDesc::real()).unwrap();
        assert!(GroupElement::new(rational_matrix(&[&[(2, 1), (0, 1)], &[(0, 1), (1, 1)]]), g).is_err());
        let so = GroupDesc::so(1, 1, FieldDesc::real()).unwrap();
        let rot = rational_matrix(&[&[(3, 5), (-4, 5)], &[(4, 5), (3, 5)]]);
        assert!(matches!(GroupElement::new(rot, so), Err(Error::Precondition(_))));
    }

    #[test]
    fn weight_pairing_range() {
        let v = CartanVector::new(vec![1.0, 0.5, -1.5], Chamber::TypeA);
        assert_eq!(weight_pairing(2, &v).unwrap(), 1.5);
        assert!(weight_pairing(0, &v).is_err());
        assert!(weight_pairing(3, &v).is_err());
    }

    #[test]
    fn exact_norm_comparison() {
        // √8 ≤ √2 + √2 holds with equality
        assert!(norm_le_sum_exact(8, 2, 2));
        assert!(!norm_le_sum_exact(9, 2, 2));
        assert!(norm_le_sum_exact(2, 2, 0));
    }
}
