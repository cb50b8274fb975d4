//! Quadratic-form groups over ℚ(√r), their Lie algebras, and bending
//! deformations of amalgams and HNN extensions.
//!
//! The ambient space carries `x₁² + … + x_m² − √r·x_{m+1}² − x_{m+2}²`.
//! `SO(m,1)` is the stabilizer of the last coordinate, and the bending
//! direction defaults to the boost `Y = E_{1,m+2} + E_{m+2,1}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cartan::GroupDesc;
use crate::error::{Error, Result};
use crate::fields::{FieldDesc, QuadNum, Scalar};
use crate::linalg::{int, ExactMat, Matrix, QMat, QuadMat};
use crate::wordgroups::{check_relators_tol, evaluate, Homomorphism, Presentation, Structure, Word};

pub const DEFAULT_RADICAND: u64 = 2;
/// Relator tolerance for bent homomorphisms with floating images.
pub const BEND_RELATOR_TOL: f64 = 1e-10;
/// Relative residual below which a floating vector counts as dependent.
pub const RANK_TOL: f64 = 1e-9;

/// A diagonal quadratic form over ℚ(√r).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadFormSpace {
    coeffs: Vec<QuadNum>,
    radicand: u64,
    signature: (usize, usize),
}

impl QuadFormSpace {
    pub fn new(coeffs: Vec<QuadNum>, radicand: u64) -> Result<Self> {
        let mut pos = 0;
        let mut neg = 0;
        for c in &coeffs {
            if c.radicand() != 0 && c.radicand() != radicand {
                return Err(Error::invalid("form coefficient from another quadratic field"));
            }
            match c.signum() {
                1 => pos += 1,
                -1 => neg += 1,
                _ => return Err(Error::invalid("zero form coefficient")),
            }
        }
        if coeffs.len() < 2 {
            return Err(Error::invalid("form needs dimension at least 2"));
        }
        let coeffs = coeffs.into_iter().map(|c| c.with_radicand(radicand)).collect();
        Ok(QuadFormSpace { coeffs, radicand, signature: (pos, neg) })
    }

    /// `x₁² + … + x_m² − √r·x_{m+1}² − x_{m+2}²`.
    pub fn so_m2(m: usize, r: u64) -> Result<Self> {
        if m < 1 {
            return Err(Error::invalid("m must be positive"));
        }
        let mut c: Vec<QuadNum> = (0..m).map(|_| QuadNum::from_ints(1, 0, r)).collect();
        c.push(QuadNum::from_ints(0, -1, r));
        c.push(QuadNum::from_ints(-1, 0, r));
        Self::new(c, r)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[QuadNum] {
        &self.coeffs
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    /// Real-embedding signature `(positive, negative)`.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn form_matrix(&self) -> QuadMat {
        ExactMat::diag(self.coeffs.clone())
    }

    /// The orthogonal group of the form as a group descriptor.
    pub fn group(&self) -> Result<GroupDesc> {
        let (p, q) = self.signature;
        let form = self.coeffs.iter().map(|c| Scalar::Quadratic(c.clone())).collect();
        GroupDesc::so_with_form(p, q, FieldDesc::quadratic(self.radicand)?, form)
    }

    /// The form restricted to the coordinates other than `k`.
    pub fn drop_coordinate(&self, k: usize) -> Result<Self> {
        let c = self.coeffs.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, c)| c.clone()).collect();
        Self::new(c, self.radicand)
    }

    /// `XᵀJ + JX = 0`, exactly.
    pub fn in_algebra(&self, x: &QuadMat) -> bool {
        let j = self.form_matrix();
        x.nrows() == self.dim() && x.transpose().mul(&j).add(&j.mul(x)).is_zero()
    }

    /// `gᵀJg = J`, exactly.
    pub fn preserves(&self, g: &QuadMat) -> bool {
        let j = self.form_matrix();
        g.nrows() == self.dim() && g.transpose().mul(&j).mul(g) == j
    }
}

fn q(x: i64) -> QuadNum {
    QuadNum::rational(int(x))
}

/// Exact ℚ(√r) matrix from any exact `Matrix`.
pub fn to_quad(m: &Matrix) -> Result<QuadMat> {
    match m {
        Matrix::Quadratic(x) => Ok(x.clone()),
        Matrix::Rational(x) => Ok(Matrix::to_quadratic(x)),
        _ => Err(Error::invalid("exact entries required")),
    }
}

fn bracket(a: &QuadMat, b: &QuadMat) -> QuadMat {
    a.mul(b).sub(&b.mul(a))
}

fn frobenius(a: &QuadMat, b: &QuadMat) -> QuadNum {
    a.entries().iter().zip(b.entries()).fold(QuadNum::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Incremental row-echelon span over an exact field.
#[derive(Clone, Debug, Default)]
struct ExactSpan {
    rows: Vec<(usize, Vec<QuadNum>)>,
}

impl ExactSpan {
    fn reduce(&self, v: &[QuadNum]) -> Vec<QuadNum> {
        let mut v = v.to_vec();
        for (p, r) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(r) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        v
    }

    fn contains(&self, v: &[QuadNum]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; false when it was already in the span.
    fn insert(&mut self, v: &[QuadNum]) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = QuadNum::one() / v[p].clone();
        let v: Vec<QuadNum> = v.into_iter().map(|x| x * inv.clone()).collect();
        for (_, r) in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (x, y) in r.iter_mut().zip(&v) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        self.rows.push((p, v));
        true
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// A basis of a Lie subalgebra of `𝔤𝔩_d` preserving a form.
#[derive(Clone, Debug, PartialEq)]
pub struct LieBasis {
    pub basis: Vec<QuadMat>,
    pub space: QuadFormSpace,
}

impl LieBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn span(&self) -> ExactSpan {
        let mut s = ExactSpan::default();
        for b in &self.basis {
            s.insert(b.entries());
        }
        s
    }

    pub fn contains(&self, x: &QuadMat) -> bool {
        self.span().contains(x.entries())
    }

    /// Form equation, independence and bracket closure, all exact.
    pub fn verify(&self) -> Result<()> {
        if let Some(i) = self.basis.iter().position(|x| !self.space.in_algebra(x)) {
            return Err(Error::numerical(format!("basis element {i} violates XᵀJ + JX = 0")));
        }
        let span = self.span();
        if span.dim() != self.basis.len() {
            return Err(Error::numerical("basis is linearly dependent"));
        }
        for a in &self.basis {
            for b in &self.basis {
                if !span.contains(bracket(a, b).entries()) {
                    return Err(Error::numerical("span is not closed under brackets"));
                }
            }
        }
        Ok(())
    }

    pub fn to_f64(&self) -> Vec<DMatrix<f64>> {
        self.basis.iter().map(quad_to_f64).collect()
    }
}

fn quad_to_f64(m: &QuadMat) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].to_f64())
}

/// Basis of `{X : XᵀJ + JX = 0}` by an exact nullspace computation.
pub fn so_form_algebra(space: &QuadFormSpace) -> LieBasis {
    let d = space.dim();
    let c = space.coeffs();
    let mut rows = Vec::new();
    for i in 0..d {
        for j in i..d {
            let mut row = vec![QuadNum::zero(); d * d];
            // (XᵀJ + JX)_ij = J_jj X_ji + J_ii X_ij
            row[j * d + i] = row[j * d + i].clone() + c[j].clone();
            row[i * d + j] = row[i * d + j].clone() + c[i].clone();
            rows.push(row);
        }
    }
    let sys = ExactMat::from_rows(rows).expect("rectangular");
    let basis = sys.nullspace().into_iter().map(|v| ExactMat::from_vec(d, d, v)).collect();
    LieBasis { basis, space: space.clone() }
}

/// The subalgebra fixing coordinate `k`: elements with zero row and column `k`.
pub fn stabilizer_subalgebra(space: &QuadFormSpace, k: usize) -> Result<LieBasis> {
    let d = space.dim();
    if k >= d {
        return Err(Error::invalid("coordinate out of range"));
    }
    let inner = so_form_algebra(&space.drop_coordinate(k)?);
    let shrink = |i: usize| if i < k { i } else { i - 1 };
    let basis = inner
        .basis
        .iter()
        .map(|x| {
            ExactMat::from_fn(d, d, |i, j| if i == k || j == k { QuadNum::zero() } else { x[(shrink(i), shrink(j))].clone() })
        })
        .collect();
    Ok(LieBasis { basis, space: space.clone() })
}

/// `𝔰𝔬(m,1) ⊂ 𝔰𝔬(m,2)`, the stabilizer of the last coordinate.
pub fn so_m1_in_m2(space: &QuadFormSpace) -> Result<LieBasis> {
    stabilizer_subalgebra(space, space.dim() - 1)
}

/// `{X ∈ span(ambient) : sX = Xs for all s ∈ S}`.
pub fn centralizer_in_algebra(s: &[Matrix], ambient: &LieBasis) -> Result<LieBasis> {
    let d = ambient.space.dim();
    let mats = s.iter().map(to_quad).collect::<Result<Vec<_>>>()?;
    for (i, m) in mats.iter().enumerate() {
        if !ambient.space.preserves(m) {
            return Err(Error::precondition(format!("element {i} does not preserve the form")));
        }
    }
    if mats.is_empty() || ambient.basis.is_empty() {
        return Ok(ambient.clone());
    }
    let k = ambient.basis.len();
    // one column per basis element, stacking vec(sB − Bs) over s
    let cols: Vec<Vec<QuadNum>> = ambient
        .basis
        .iter()
        .map(|b| mats.iter().flat_map(|m| bracket(m, b).entries().to_vec()).collect())
        .collect();
    let nrows = mats.len() * d * d;
    let sys = ExactMat::from_fn(nrows, k, |i, j| cols[j][i].clone());
    let basis = sys
        .nullspace()
        .into_iter()
        .map(|coef| {
            coef.iter().zip(&ambient.basis).fold(ExactMat::zeros(d, d), |acc, (c, b)| acc.add(&b.scale(c)))
        })
        .collect();
    Ok(LieBasis { basis, space: ambient.space.clone() })
}

/// The centralizer basis vector farthest (Frobenius) from `span(h)`; ties go to the lower index.
pub fn pick_y(c: &LieBasis, h: &LieBasis) -> Result<QuadMat> {
    let k = h.basis.len();
    let gram_inv = if k == 0 {
        None
    } else {
        Some(ExactMat::from_fn(k, k, |i, j| frobenius(&h.basis[i], &h.basis[j])).inverse()?)
    };
    let mut best: Option<(QuadNum, usize)> = None;
    for (idx, x) in c.basis.iter().enumerate() {
        let mut d2 = frobenius(x, x);
        if let Some(gi) = &gram_inv {
            let b: Vec<QuadNum> = h.basis.iter().map(|hb| frobenius(hb, x)).collect();
            for i in 0..k {
                for j in 0..k {
                    d2 = d2 - b[i].clone() * gi[(i, j)].clone() * b[j].clone();
                }
            }
        }
        if best.as_ref().is_none_or(|(d, _)| d2 > *d) {
            best = Some((d2, idx));
        }
    }
    match best {
        Some((d, idx)) if !d.is_zero() => Ok(c.basis[idx].clone()),
        _ => Err(Error::precondition("centralizer lies inside so(m,1); no bending direction")),
    }
}

/// `E_{1,d} + E_{d,1}`.
pub fn boost_y(space: &QuadFormSpace) -> QuadMat {
    let d = space.dim();
    let mut y = ExactMat::zeros(d, d);
    y[(0, d - 1)] = q(1);
    y[(d - 1, 0)] = q(1);
    y
}

/// `c` with `Y³ = c·Y`, when it exists.
pub fn cubic_constant(y: &QuadMat) -> Option<QuadNum> {
    let y3 = y.mul(y).mul(y);
    let Some(i) = y.entries().iter().position(|x| !x.is_zero()) else {
        return Some(QuadNum::zero());
    };
    let c = y3.entries()[i].clone() / y.entries()[i].clone();
    (y3 == y.scale(&c)).then_some(c)
}

/// `e^{tY}` in double precision.
///
/// When `Y³ = cY` the closed form `I + f(t)·Y + g(t)·Y²` is used
/// (hyperbolic for `c > 0`, trigonometric for `c < 0`, polynomial for
/// `c = 0`); otherwise scaling and squaring around a Taylor series whose
/// tail is below `10⁻¹⁴`.
pub fn expm(y: &QuadMat, t: f64) -> DMatrix<f64> {
    let d = y.nrows();
    let yf = quad_to_f64(y);
    let y2 = &yf * &yf;
    let id = DMatrix::<f64>::identity(d, d);
    if let Some(c) = cubic_constant(y) {
        let cf = c.to_f64();
        let (f, g) = match c.signum() {
            1 => {
                let s = cf.sqrt();
                ((t * s).sinh() / s, ((t * s).cosh() - 1.0) / cf)
            }
            -1 => {
                let s = (-cf).sqrt();
                ((t * s).sin() / s, (1.0 - (t * s).cos()) / (-cf))
            }
            _ => (t, t * t / 2.0),
        };
        return id + yf * f + y2 * g;
    }
    let a = yf * t;
    let norm = a.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
    let s = (norm / 0.5).log2().ceil().max(0.0) as i32;
    let a = a / 2f64.powi(s);
    let mut term = id.clone();
    let mut sum = id;
    for k in 1..60 {
        term = &term * &a / k as f64;
        sum += &term;
        if term.iter().map(|x| x.abs()).sum::<f64>() < 1e-17 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BendRule {
    Amalgam,
    Hnn,
}

/// A presentation with an amalgam or HNN structure, placed in `SO(form)`,
/// with a bending direction `Y`.
#[derive(Clone, Debug)]
pub struct BendingFamily {
    pub presentation: Presentation,
    pub space: QuadFormSpace,
    pub y: QuadMat,
    pub rule: BendRule,
}

impl BendingFamily {
    /// Checks `Y ∈ 𝔰𝔬(Q) ∖ 𝔰𝔬(m,1)` and that `Y` centralizes `Γ₀`.
    pub fn new(presentation: Presentation, space: QuadFormSpace, y: QuadMat) -> Result<Self> {
        let rule = match presentation.structure() {
            Structure::Amalgam { .. } => BendRule::Amalgam,
            Structure::Hnn { .. } => BendRule::Hnn,
            Structure::Free => return Err(Error::invalid("bending needs an amalgam or HNN presentation")),
        };
        if !space.in_algebra(&y) {
            return Err(Error::precondition("Y does not satisfy YᵀJ + JY = 0"));
        }
        if so_m1_in_m2(&space)?.contains(&y) {
            return Err(Error::precondition("Y lies in so(m,1)"));
        }
        for (i, g) in presentation.generators().iter().enumerate() {
            if !space.preserves(&to_quad(g.matrix())?) {
                return Err(Error::precondition(format!("generator {} does not preserve the form", presentation.symbols()[i])));
            }
        }
        let fam = BendingFamily { presentation, space, y, rule };
        for g in fam.gamma0()? {
            if !bracket(&to_quad(&g)?, &fam.y).is_zero() {
                return Err(Error::precondition("Y does not centralize the common subgroup"));
            }
        }
        Ok(fam)
    }

    /// Picks `Y` from the centralizer of `Γ₀` in `𝔰𝔬(Q)`.
    pub fn with_centralizer(presentation: Presentation, space: QuadFormSpace) -> Result<Self> {
        let tmp = BendingFamily { presentation: presentation.clone(), space: space.clone(), y: boost_y(&space), rule: BendRule::Amalgam };
        let c = centralizer_in_algebra(&tmp.gamma0()?, &so_form_algebra(&space))?;
        let y = pick_y(&c, &so_m1_in_m2(&space)?)?;
        Self::new(presentation, space, y)
    }

    /// Images of the words generating `Γ₀` (side-1 words, or `j₁` words).
    pub fn gamma0(&self) -> Result<Vec<Matrix>> {
        let phi = self.presentation.inclusion();
        let words: Vec<&Word> = match self.presentation.structure() {
            Structure::Amalgam { common, .. } => common.iter().map(|(a, _)| a).collect(),
            Structure::Hnn { pairings, .. } => pairings.iter().map(|(a, _)| a).collect(),
            Structure::Free => Vec::new(),
        };
        words.into_iter().map(|w| evaluate(w, &phi).map(|g| g.into_matrix())).collect()
    }

    pub fn group(&self) -> &GroupDesc {
        self.presentation.group()
    }
}

/// The bent homomorphism `φ_t`; `t = 0` returns the inclusion itself.
pub fn bend(b: &BendingFamily, t: f64) -> Result<Homomorphism> {
    if !t.is_finite() {
        return Err(Error::invalid("t must be finite"));
    }
    let incl = b.presentation.inclusion();
    if t == 0.0 {
        return Ok(incl);
    }
    let e = Matrix::Real(expm(&b.y, t));
    let ei = Matrix::Real(expm(&b.y, -t));
    let mut images: Vec<Matrix> = incl.images().to_vec();
    match b.presentation.structure() {
        Structure::Amalgam { side2, .. } => {
            for &i in side2 {
                images[i] = e.mul(&images[i])?.mul(&ei)?;
            }
        }
        Structure::Hnn { stable, .. } => {
            images[*stable] = images[*stable].mul(&e)?;
        }
        Structure::Free => unreachable!(),
    }
    let phi = Homomorphism::new(b.group().clone(), images)?;
    let rep = check_relators_tol(&b.presentation, &phi, BEND_RELATOR_TOL)?;
    if !rep.pass {
        return Err(Error::numerical(format!(
            "bent homomorphism fails relators at t = {t} (max deviation {:.3e})",
            rep.max_deviation
        )));
    }
    Ok(phi)
}

/// Outcome of the decomposition `𝔰𝔬(m,2) = 𝔰𝔬(m,1) ⊕ W`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuleVerdict {
    pub m: usize,
    pub dim_so_m2: usize,
    pub dim_so_m1: usize,
    pub dim_w: usize,
    pub module: bool,
    /// Per basis vector `w` of `W`: dimension of the bracket closure of `𝔰𝔬(m,1) ∪ {w}`.
    pub closure_dims: Vec<usize>,
    pub pass: bool,
}

fn closure_exact(gens: Vec<QuadMat>) -> (ExactSpan, Vec<QuadMat>) {
    let mut span = ExactSpan::default();
    let mut basis = Vec::new();
    for g in gens {
        if span.insert(g.entries()) {
            basis.push(g);
        }
    }
    let mut i = 0;
    while i < basis.len() {
        for j in 0..i {
            let c = bracket(&basis[i], &basis[j]);
            if span.insert(c.entries()) {
                basis.push(c);
            }
        }
        i += 1;
    }
    (span, basis)
}

/// Exact check that the Frobenius complement of `𝔰𝔬(m,1)` is an `(m+1)`-dimensional
/// module whose every basis vector generates `𝔰𝔬(m,2)` together with `𝔰𝔬(m,1)`.
pub fn module_decomposition_check(m: usize) -> Result<ModuleVerdict> {
    module_decomposition_check_in(&QuadFormSpace::so_m2(m, DEFAULT_RADICAND)?)
}

pub fn module_decomposition_check_in(space: &QuadFormSpace) -> Result<ModuleVerdict> {
    let m = space.dim() - 2;
    if m < 2 {
        return Err(Error::invalid("m must be at least 2"));
    }
    let g = so_form_algebra(space);
    let h = so_m1_in_m2(space)?;
    let k = g.basis.len();
    // coefficients c with ⟨Σ c_i g_i, h_j⟩ = 0 for every j
    let sys = ExactMat::from_fn(h.basis.len(), k, |j, i| frobenius(&g.basis[i], &h.basis[j]));
    let d = space.dim();
    let w: Vec<QuadMat> = sys
        .nullspace()
        .into_iter()
        .map(|c| c.iter().zip(&g.basis).fold(ExactMat::zeros(d, d), |acc, (ci, gi)| acc.add(&gi.scale(ci))))
        .collect();
    let w_span = {
        let mut s = ExactSpan::default();
        for x in &w {
            s.insert(x.entries());
        }
        s
    };
    let module = h.basis.iter().all(|a| w.iter().all(|b| w_span.contains(bracket(a, b).entries())));
    let closure_dims: Vec<usize> = w
        .iter()
        .map(|x| {
            let mut gens = h.basis.clone();
            gens.push(x.clone());
            closure_exact(gens).0.dim()
        })
        .collect();
    let pass = w.len() == m + 1 && h.basis.len() + w.len() == k && module && closure_dims.iter().all(|&c| c == k);
    Ok(ModuleVerdict { m, dim_so_m2: k, dim_so_m1: h.basis.len(), dim_w: w.len(), module, closure_dims, pass })
}

/// Floating Gram–Schmidt span.
struct FloatSpan {
    basis: Vec<Vec<f64>>,
}

impl FloatSpan {
    fn insert(&mut self, v: &[f64]) -> bool {
        let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n0 == 0.0 {
            return false;
        }
        let mut u: Vec<f64> = v.iter().map(|x| x / n0).collect();
        for _ in 0..2 {
            for b in &self.basis {
                let c: f64 = u.iter().zip(b).map(|(x, y)| x * y).sum();
                u.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n <= RANK_TOL {
            return false;
        }
        self.basis.push(u.into_iter().map(|x| x / n).collect());
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityVerdict {
    pub t: f64,
    /// `Ad(e^{tY})(𝔰𝔬(m,1)) ⊄ 𝔰𝔬(m,1)`.
    pub escapes: bool,
    pub closure_dim: usize,
    pub target_dim: usize,
    pub dense: bool,
    /// The witness is Lie-algebraic; density of the side groups in `SO(m,1)` is assumed.
    pub assumption: &'static str,
}

/// Lie-algebra witness that `SO(m,1)°` and its `e^{tY}`-conjugate generate a
/// Zariski-dense subgroup of `SO(m,2)`.
pub fn zariski_density_witness(y: &QuadMat, t: f64, space: &QuadFormSpace) -> Result<DensityVerdict> {
    if !space.in_algebra(y) {
        return Err(Error::precondition("Y is not in so(m,2)"));
    }
    let h = so_m1_in_m2(space)?.to_f64();
    let target = so_form_algebra(space).dim();
    let e = expm(y, t);
    let ei = expm(y, -t);
    let conj: Vec<DMatrix<f64>> = h.iter().map(|x| &e * x * &ei).collect();
    let mut span = FloatSpan { basis: Vec::new() };
    let mut mats: Vec<DMatrix<f64>> = Vec::new();
    for x in &h {
        if span.insert(x.as_slice()) {
            mats.push(x.clone());
        }
    }
    let base = span.basis.len();
    for x in &conj {
        if span.insert(x.as_slice()) {
            mats.push(x.clone());
        }
    }
    let escapes = span.basis.len() > base;
    let mut i = 0;
    while i < mats.len() && span.basis.len() < target + 1 {
        for j in 0..i {
            let c = &mats[i] * &mats[j] - &mats[j] * &mats[i];
            if span.insert(c.as_slice()) {
                mats.push(c);
            }
        }
        i += 1;
    }
    let closure_dim = span.basis.len();
    Ok(DensityVerdict {
        t,
        escapes,
        closure_dim,
        target_dim: target,
        dense: escapes && closure_dim == target,
        assumption: "side groups Zariski-dense in SO(m,1)",
    })
}

/// A complex matrix with Gaussian-rational entries `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMat {
    pub re: QMat,
    pub im: QMat,
}

impl GaussianMat {
    pub fn new(re: QMat, im: QMat) -> Result<Self> {
        if re.nrows() != im.nrows() || re.ncols() != im.ncols() {
            return Err(Error::invalid("real and imaginary parts differ in shape"));
        }
        Ok(GaussianMat { re, im })
    }

    pub fn identity(n: usize) -> Self {
        GaussianMat { re: QMat::identity(n), im: QMat::zeros(n, n) }
    }

    pub fn mul(&self, o: &GaussianMat) -> GaussianMat {
        GaussianMat {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn n(&self) -> usize {
        self.re.nrows()
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(crate::fields::rational_to_f64(&self.re[(i, j)]), crate::fields::rational_to_f64(&self.im[(i, j)]))
        })
    }
}

/// Realification `U(n,1) → SO(2n,2)`: each entry `a + bi` becomes `[[a, −b], [b, a]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UEmbed {
    pub n: usize,
}

impl UEmbed {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("n must be positive"));
        }
        Ok(UEmbed { n })
    }

    pub fn target(&self) -> Result<GroupDesc> {
        GroupDesc::so(2 * self.n, 2, FieldDesc::real())
    }

    pub fn target_exact(&self) -> Result<GroupDesc> {
        GroupDesc::so(2 * self.n, 2, FieldDesc::quadratic(DEFAULT_RADICAND)?)
    }

    fn check(&self, k: usize) -> Result<()> {
        if k != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: k });
        }
        Ok(())
    }

    pub fn apply_exact(&self, z: &GaussianMat) -> Result<QMat> {
        self.check(z.n())?;
        let k = z.n();
        Ok(ExactMat::from_fn(2 * k, 2 * k, |i, j| {
            let (a, b) = (&z.re[(i / 2, j / 2)], &z.im[(i / 2, j / 2)]);
            match (i % 2, j % 2) {
                (0, 0) | (1, 1) => a.clone(),
                (0, 1) => -b.clone(),
                _ => b.clone(),
            }
        }))
    }

    pub fn apply(&self, z: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
        self.check(z.nrows())?;
        let k = z.nrows();
        Ok(DMatrix::from_fn(2 * k, 2 * k, |i, j| {
            let w = z[(i / 2, j / 2)];
            match (i % 2, j % 2) {
                (0, 0) | (1, 1) => w.re,
                (0, 1) => -w.im,
                _ => w.im,
            }
        }))
    }

    /// `MᵀJM − J` for the image, exactly.
    pub fn form_residual_exact(&self, z: &GaussianMat) -> Result<QMat> {
        let m = self.apply_exact(z)?;
        let k = 2 * z.n();
        let j = ExactMat::diag((0..k).map(|i| if i < 2 * self.n { int(1) } else { int(-1) }).collect());
        Ok(m.transpose().mul(&j).mul(&m).sub(&j))
    }

    /// The real vector of the base point `z_{n+1} = 1`.
    pub fn base_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; 2 * self.n + 2];
        v[2 * self.n] = 1.0;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn sp(m: usize) -> QuadFormSpace {
        QuadFormSpace::so_m2(m, 2).unwrap()
    }

    #[test]
    fn algebra_dimensions() {
        for m in 1..=4 {
            let s = sp(m);
            let a = so_form_algebra(&s);
            assert_eq!(a.dim(), (m + 2) * (m + 1) / 2);
            a.verify().unwrap();
        }
        let h = so_m1_in_m2(&sp(2)).unwrap();
        assert_eq!(h.dim(), 3);
        h.verify().unwrap();
    }

    #[test]
    fn boost_is_bending_direction() {
        let s = sp(2);
        let y = boost_y(&s);
        assert!(s.in_algebra(&y));
        assert_eq!(cubic_constant(&y), Some(q(1)));
        let e = expm(&y, 0.5);
        assert!((e[(0, 0)] - 0.5f64.cosh()).abs() < 1e-15);
        assert!((e[(0, 3)] - 0.5f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn taylor_matches_closed_form() {
        let s = sp(3);
        let g = so_form_algebra(&s);
        let x = g.basis.iter().fold(ExactMat::zeros(5, 5), |acc, b| acc.add(b));
        assert!(cubic_constant(&x).is_none());
        let e = expm(&x, 0.7);
        let ei = expm(&x, -0.7);
        let id = &e * &ei;
        assert!((id - DMatrix::<f64>::identity(5, 5)).abs().max() < 1e-12);
    }

    #[test]
    fn centralizer_of_identity_is_everything() {
        let s = sp(2);
        let g = so_form_algebra(&s);
        let c = centralizer_in_algebra(&[Matrix::Rational(QMat::identity(4))], &g).unwrap();
        assert_eq!(c.dim(), g.dim());
    }

    #[test]
    fn pick_y_prefers_escaping_direction() {
        let s = sp(2);
        let h = so_m1_in_m2(&s).unwrap();
        let y = boost_y(&s);
        let c = LieBasis { basis: vec![h.basis[0].clone(), y.clone()], space: s.clone() };
        assert_eq!(pick_y(&c, &h).unwrap(), y);
        assert!(pick_y(&LieBasis { basis: vec![h.basis[0].clone()], space: s }, &h).is_err());
    }

    #[test]
    fn module_check_small() {
        let v = module_decomposition_check(2).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!((v.dim_so_m1, v.dim_w), (3, 3));
    }

    #[test]
    fn density_witness_basic() {
        let s = sp(2);
        let y = boost_y(&s);
        assert!(!zariski_density_witness(&y, 0.0, &s).unwrap().dense);
        assert!(zariski_density_witness(&y, 0.1, &s).unwrap().dense);
        let h = so_m1_in_m2(&s).unwrap();
        assert!(!zariski_density_witness(&h.basis[0], 0.5, &s).unwrap().dense);
    }

    #[test]
    fn u_embed_rotation() {
        let e = UEmbed::new(1).unwrap();
        let mut z = GaussianMat::identity(2);
        z.re[(0, 0)] = int(0);
        z.im[(0, 0)] = int(1);
        let m = e.apply_exact(&z).unwrap();
        assert_eq!(m[(0, 1)], int(-1));
        assert_eq!(m[(1, 0)], int(1));
        assert!(e.form_residual_exact(&z).unwrap().is_zero());
        assert_eq!(m.det(), int(1));
        let u = GaussianMat::new(
            ExactMat::diag(vec![rat(3, 5), int(1)]),
            ExactMat::diag(vec![rat(4, 5), int(0)]),
        )
        .unwrap();
        let mf = e.apply(&u.to_complex()).unwrap();
        let v = nalgebra::DVector::from_vec(e.base_vector());
        assert!((&mf * &v - &v).norm() < 1e-15);
    }
}
