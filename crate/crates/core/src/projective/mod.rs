//! Projective space with the sup-norm metric, proximality and the product
//! contraction sandwich.
//!
//! Distances use `d(x₁, x₂) = inf ‖v₁ − v₂‖∞` over sup-norm-one
//! representatives. Over ℚ_p this infimum equals `max_{i<j} |v₁ᵢv₂ⱼ − v₁ⱼv₂ᵢ|`;
//! over ℝ it is `min(‖v₁ − v₂‖, ‖v₁ + v₂‖)`; over ℂ it is minimized over the phase.

pub mod padic;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cartan::{cartan, weight_pairing, GroupElement};
use crate::error::{Error, Result};
use crate::fields::{rational_to_f64, val_p, FieldDesc, Scalar};
use crate::linalg::{ExactMat, Matrix, QMat};

/// Coordinates of a vector in the fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub enum Coords {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    Padic { p: u64, v: Vec<BigRational> },
}

impl Coords {
    pub fn len(&self) -> usize {
        match self {
            Coords::Real(v) => v.len(),
            Coords::Complex(v) => v.len(),
            Coords::Padic { v, .. } => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Divides by the first coordinate of maximal size, so the result has
    /// sup-norm one and is canonical on the line.
    fn normalized(self) -> Result<Coords> {
        match self {
            Coords::Real(v) => {
                let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                if !(m > 0.0 && m.is_finite()) {
                    return Err(Error::invalid("zero or non-finite vector"));
                }
                let piv = v[v.iter().position(|x| x.abs() == m).unwrap()];
                Ok(Coords::Real(v.iter().map(|x| x / piv).collect()))
            }
            Coords::Complex(v) => {
                let m = v.iter().fold(0.0f64, |a, z| a.max(z.norm()));
                if !(m > 0.0 && m.is_finite()) {
                    return Err(Error::invalid("zero or non-finite vector"));
                }
                let piv = v[v.iter().position(|z| z.norm() == m).unwrap()];
                Ok(Coords::Complex(v.iter().map(|z| z / piv).collect()))
            }
            Coords::Padic { p, v } => {
                let vals: Vec<Option<i64>> = v.iter().map(|x| val_p(x, p)).collect();
                let Some(m) = vals.iter().flatten().min().copied() else {
                    return Err(Error::invalid("zero vector"));
                };
                let piv = v[vals.iter().position(|x| *x == Some(m)).unwrap()].clone();
                Ok(Coords::Padic { p, v: v.into_iter().map(|x| x / &piv).collect() })
            }
        }
    }

    fn to_f64(&self) -> Vec<f64> {
        match self {
            Coords::Real(v) => v.clone(),
            Coords::Complex(v) => v.iter().map(|z| z.re).collect(),
            Coords::Padic { v, .. } => v.iter().map(rational_to_f64).collect(),
        }
    }
}

/// A point of ℙ(V), stored as its canonical sup-norm-one representative.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    coords: Coords,
}

impl ProjPoint {
    pub fn new(coords: Coords) -> Result<Self> {
        Ok(ProjPoint { coords: coords.normalized()? })
    }

    pub fn real(v: Vec<f64>) -> Result<Self> {
        Self::new(Coords::Real(v))
    }

    pub fn complex(v: Vec<Complex64>) -> Result<Self> {
        Self::new(Coords::Complex(v))
    }

    pub fn padic(p: u64, v: Vec<BigRational>) -> Result<Self> {
        Self::new(Coords::Padic { p, v })
    }

    /// The `k`-th coordinate line.
    pub fn basis(field: &FieldDesc, n: usize, k: usize) -> Self {
        let coords = match field.prime() {
            Some(p) => Coords::Padic {
                p,
                v: (0..n).map(|i| if i == k { BigRational::one() } else { BigRational::zero() }).collect(),
            },
            None => Coords::Real((0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()),
        };
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Approximate real coordinates, for display.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.to_f64()
    }

    /// Whether the representatives are proportional (exact over ℚ_p).
    pub fn same_point(&self, other: &ProjPoint, tol: f64) -> bool {
        proj_distance(self, other).map(|d| d <= tol).unwrap_or(false)
    }
}

/// A projective hyperplane `ℙ(ker f)`, stored by its normalized functional.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjHyperplane {
    functional: Coords,
}

impl ProjHyperplane {
    pub fn new(functional: Coords) -> Result<Self> {
        if functional.len() < 2 {
            return Err(Error::invalid("hyperplanes need dimension at least 2"));
        }
        Ok(ProjHyperplane { functional: functional.normalized()? })
    }

    /// `{x_k = 0}`.
    pub fn coordinate(field: &FieldDesc, n: usize, k: usize) -> Self {
        ProjHyperplane { functional: ProjPoint::basis(field, n, k).coords }
    }

    pub fn functional(&self) -> &Coords {
        &self.functional
    }

    /// Approximate functional coefficients, for display.
    pub fn to_f64(&self) -> Vec<f64> {
        self.functional.to_f64()
    }

    pub fn dim(&self) -> usize {
        self.functional.len()
    }
}

fn dim_check(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// Exact infimum of `‖v₁ − v₂‖∞` over sup-norm-one representatives.
///
/// Lies in `[0, 1]` over ℚ_p and in `[0, 2]` over ℝ and ℂ.
pub fn proj_distance(x1: &ProjPoint, x2: &ProjPoint) -> Result<f64> {
    dim_check(x1.dim(), x2.dim())?;
    match (&x1.coords, &x2.coords) {
        (Coords::Real(a), Coords::Real(b)) => {
            let minus = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            let plus = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x + y).abs()));
            Ok(minus.min(plus))
        }
        (Coords::Padic { p, v: a }, Coords::Padic { p: q, v: b }) if p == q => {
            Ok(padic_abs_from_val(padic_wedge_val(a, b, *p), *p))
        }
        (Coords::Padic { .. }, _) | (_, Coords::Padic { .. }) => {
            Err(Error::invalid("cannot compare p-adic and archimedean points"))
        }
        (a, b) => {
            let za = complexify(a);
            let zb = complexify(b);
            Ok(min_over_phase(&za, &zb))
        }
    }
}

fn complexify(c: &Coords) -> Vec<Complex64> {
    match c {
        Coords::Complex(v) => v.clone(),
        other => other.to_f64().into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
    }
}

fn padic_abs_from_val(v: Option<i64>, p: u64) -> f64 {
    match v {
        None => 0.0,
        Some(v) => (p as f64).powi(-(v as i32)),
    }
}

/// `min ω(aᵢbⱼ − aⱼbᵢ)` over `i < j`, `None` when `a ∧ b = 0`.
fn padic_wedge_val(a: &[BigRational], b: &[BigRational], p: u64) -> Option<i64> {
    let mut best: Option<i64> = None;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let w = &a[i] * &b[j] - &a[j] * &b[i];
            if let Some(v) = val_p(&w, p) {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
    }
    best
}

fn min_over_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    let f = |t: f64| {
        let u = Complex64::from_polar(1.0, t);
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - u * y).norm()))
    };
    const GRID: usize = 1024;
    let h = std::f64::consts::TAU / GRID as f64;
    let vals: Vec<f64> = (0..GRID).map(|i| f(i as f64 * h)).collect();
    let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    for i in 0..GRID {
        let (l, r) = (vals[(i + GRID - 1) % GRID], vals[(i + 1) % GRID]);
        if vals[i] <= l && vals[i] <= r {
            best = best.min(golden_min(&f, (i as f64 - 1.0) * h, (i as f64 + 1.0) * h, 1e-13));
        }
    }
    best
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f((a + b) / 2.0))
}

/// `d(x, X) = inf_{y ∈ X} d(x, y)`.
///
/// Over ℚ_p this is `|f(v)|` for normalized `v` and `f`. Over ℝ it is found
/// by bisection on `t`: a unit `w ∈ ker f` with `‖v − w‖ ≤ t` exists iff for
/// some coordinate `k` and sign `σ` with `|σ − v_k| ≤ t` the box
/// `w_k = σ`, `w_j ∈ [v_j − t, v_j + t] ∩ [−1, 1]` meets `ker f`.
pub fn hyperplane_distance(x: &ProjPoint, h: &ProjHyperplane) -> Result<f64> {
    dim_check(x.dim(), h.dim())?;
    match (&x.coords, &h.functional) {
        (Coords::Padic { p, v }, Coords::Padic { p: q, v: f }) if p == q => {
            let fv = v.iter().zip(f).fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
            Ok(padic_abs_from_val(val_p(&fv, *p), *p))
        }
        (Coords::Real(v), Coords::Real(f)) => Ok(real_hyperplane_distance(v, f)),
        _ => Err(Error::unsupported("point-to-hyperplane distance for these coordinates")),
    }
}

fn real_hyperplane_distance(v: &[f64], f: &[f64]) -> f64 {
    let feasible = |t: f64| {
        (0..v.len()).any(|k| {
            [1.0f64, -1.0].iter().any(|&s| {
                if (s - v[k]).abs() > t {
                    return false;
                }
                let mut lo = f[k] * s;
                let mut hi = lo;
                for j in (0..v.len()).filter(|&j| j != k) {
                    let a = (v[j] - t).max(-1.0);
                    let b = (v[j] + t).min(1.0);
                    if a > b {
                        return false;
                    }
                    let (x, y) = (f[j] * a, f[j] * b);
                    lo += x.min(y);
                    hi += x.max(y);
                }
                lo <= 1e-15 && hi >= -1e-15
            })
        })
    };
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    if feasible(0.0) {
        return 0.0;
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `g·x`.
pub fn apply(g: &Matrix, x: &ProjPoint) -> Result<ProjPoint> {
    dim_check(g.ncols(), x.dim())?;
    let coords = match (&x.coords, g) {
        (Coords::Padic { p, v }, Matrix::Rational(m)) => {
            let col = QMat::from_vec(v.len(), 1, v.clone());
            Coords::Padic { p: *p, v: m.mul(&col).entries().to_vec() }
        }
        (Coords::Padic { .. }, _) => return Err(Error::invalid("p-adic points need rational matrices")),
        (Coords::Real(v), m) if !m.is_complex() => {
            let out = m.to_real()? * nalgebra::DVector::from_vec(v.clone());
            Coords::Real(out.iter().copied().collect())
        }
        (c, m) => {
            let out = m.to_complex() * nalgebra::DVector::from_vec(complexify(c));
            Coords::Complex(out.iter().copied().collect())
        }
    };
    ProjPoint::new(coords).map_err(|_| Error::numerical("g·x vanished"))
}

/// Dominant eigen-data of a proximal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ProximalData {
    pub lambda: Scalar,
    /// `false` when λ (and hence x⁺, X⁻) is a p-adic approximation.
    pub exact: bool,
    pub x_plus: ProjPoint,
    pub x_minus: ProjHyperplane,
    /// `|λ₂| / |λ₁|`.
    pub gap_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProximalVerdict {
    Proximal(ProximalData),
    NotProximal,
    /// The top two moduli agree to within the floating threshold.
    Indeterminate { relative_gap: f64 },
}

impl ProximalVerdict {
    pub fn data(&self) -> Option<&ProximalData> {
        match self {
            ProximalVerdict::Proximal(d) => Some(d),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProximalVerdict::Proximal(_) => "proximal",
            ProximalVerdict::NotProximal => "not_proximal",
            ProximalVerdict::Indeterminate { .. } => "indeterminate",
        }
    }
}

/// Relative modulus gap at or above which a floating eigensolve declares proximality.
pub const PROXIMAL_GAP: f64 = 1e-8;
/// Relative modulus gap at or below which the top moduli are treated as equal.
pub const EQUAL_MODULI_GAP: f64 = 1e-12;
/// p-adic digits kept when λ is not rational.
pub const HENSEL_PRECISION: u32 = 40;

/// Decides proximality over `field` (ℝ or ℚ_p).
pub fn proximal_analyze(g: &Matrix, field: &FieldDesc) -> Result<ProximalVerdict> {
    if g.nrows() != g.ncols() || g.nrows() == 0 {
        return Err(Error::invalid("proximality needs a nonempty square matrix"));
    }
    match field.prime() {
        Some(p) => match g {
            Matrix::Rational(m) => proximal_padic(m, p),
            _ => Err(Error::invalid("p-adic proximality needs rational entries")),
        },
        None if g.is_complex() => Err(Error::unsupported("proximality of complex matrices")),
        None => proximal_real(&g.to_real()?),
    }
}

fn proximal_real(m: &DMatrix<f64>) -> Result<ProximalVerdict> {
    let n = m.nrows();
    if m.iter().all(|x| *x == 0.0) {
        return Err(Error::invalid("zero matrix"));
    }
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::numerical("non-finite matrix"));
    }
    let ev = m.clone().complex_eigenvalues();
    let mut moduli: Vec<(f64, Complex64)> = ev.iter().map(|z| (z.norm(), *z)).collect();
    moduli.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (m1, top) = moduli[0];
    if !(m1.is_finite()) || m1 == 0.0 {
        return Ok(ProximalVerdict::NotProximal);
    }
    let m2 = moduli.get(1).map_or(0.0, |x| x.0);
    let gap = (m1 - m2) / m1;
    if gap <= EQUAL_MODULI_GAP {
        return Ok(ProximalVerdict::NotProximal);
    }
    if gap < PROXIMAL_GAP || top.im.abs() > 1e-9 * m1 {
        return Ok(ProximalVerdict::Indeterminate { relative_gap: gap });
    }
    let lambda = top.re;
    let shifted = m - DMatrix::identity(n, n) * lambda;
    let right = smallest_singular_vector(&shifted)?;
    let left = smallest_singular_vector(&shifted.transpose())?;
    Ok(ProximalVerdict::Proximal(ProximalData {
        lambda: Scalar::Real(lambda),
        exact: false,
        x_plus: ProjPoint::real(right)?,
        x_minus: if n >= 2 { ProjHyperplane::new(Coords::Real(left))? } else { degenerate_hyperplane() },
        gap_ratio: m2 / m1,
    }))
}

fn degenerate_hyperplane() -> ProjHyperplane {
    ProjHyperplane { functional: Coords::Real(vec![1.0]) }
}

fn smallest_singular_vector(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.ncols();
    // smallest eigenvector of mᵀm via the symmetric eigensolver
    let ata = m.transpose() * m;
    let eig = ata.symmetric_eigen();
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::numerical("empty eigensolve"))?;
    let v: Vec<f64> = (0..n).map(|i| eig.eigenvectors[(i, idx)]).collect();
    Ok(v)
}

fn proximal_padic(m: &QMat, p: u64) -> Result<ProximalVerdict> {
    let n = m.nrows();
    if m.is_zero() {
        return Err(Error::invalid("zero matrix"));
    }
    let cp = m.char_poly();
    let vals = padic::root_valuations(&cp, p);
    let zero_roots = cp.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let Some((top_val, mult)) = vals.first().cloned() else {
        return Ok(ProximalVerdict::NotProximal);
    };
    if mult != 1 || !top_val.is_integer() {
        return Ok(ProximalVerdict::NotProximal);
    }
    let v = top_val.to_integer();
    let v: i64 = num_traits::ToPrimitive::to_i64(&v).ok_or_else(|| Error::numerical("valuation overflow"))?;
    let gap_ratio = match vals.get(1) {
        Some((v2, _)) => (p as f64).powf(rational_to_f64(&(&top_val - v2))),
        None if zero_roots > 0 => 0.0,
        None => 0.0,
    };
    let root = padic::simple_root(&cp, p, v, HENSEL_PRECISION)
        .ok_or_else(|| Error::numerical("Hensel lifting failed"))?;
    let lam = root.value.clone();
    let shifted = m.sub(&QMat::identity(n).scale(&lam));
    let (right, left) = if root.exact {
        let r = shifted.nullspace();
        let l = shifted.transpose().nullspace();
        match (r.first(), l.first()) {
            (Some(r), Some(l)) => (r.clone(), l.clone()),
            _ => return Err(Error::numerical("eigenspace of an exact root is trivial")),
        }
    } else {
        let adj = adjugate(&shifted)?;
        (best_line(&adj, p, true), best_line(&adj, p, false))
    };
    Ok(ProximalVerdict::Proximal(ProximalData {
        lambda: Scalar::Rational(lam),
        exact: root.exact,
        x_plus: ProjPoint::padic(p, right)?,
        x_minus: if n >= 2 {
            ProjHyperplane::new(Coords::Padic { p, v: left })?
        } else {
            ProjHyperplane { functional: Coords::Padic { p, v: vec![BigRational::one()] } }
        },
        gap_ratio,
    }))
}

fn adjugate(a: &QMat) -> Result<QMat> {
    let d = a.det();
    if d.is_zero() {
        return Err(Error::Singular);
    }
    Ok(a.inverse()?.scale(&d))
}

/// The column (or row) of `adj` of largest sup-norm: for `λ` close to a simple
/// eigenvalue `adj(A − λ)` is close to rank one with that column spanning the eigenline.
fn best_line(adj: &QMat, p: u64, column: bool) -> Vec<BigRational> {
    let n = adj.nrows();
    let get = |a: usize, b: usize| if column { adj[(b, a)].clone() } else { adj[(a, b)].clone() };
    let mut best: Option<(i64, usize)> = None;
    for a in 0..n {
        if let Some(v) = (0..n).filter_map(|b| val_p(&get(a, b), p)).min() {
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, a));
            }
        }
    }
    let a = best.map_or(0, |b| b.1);
    (0..n).map(|b| get(a, b)).collect()
}

/// Deterministic sampling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleGrid {
    pub points: usize,
    pub seed: u64,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid { points: 10_000, seed: 0 }
    }
}

fn sample_points(field: &FieldDesc, n: usize, grid: SampleGrid) -> Vec<ProjPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut out = Vec::with_capacity(grid.points + n);
    for k in 0..n {
        out.push(ProjPoint::basis(field, n, k));
    }
    while out.len() < grid.points + n {
        let pt = match field.prime() {
            Some(p) => {
                let v: Vec<BigRational> = (0..n)
                    .map(|_| {
                        let e = rng.gen_range(0..4u32);
                        let u = rng.gen_range(0..(p * p) as i64);
                        BigRational::from_integer((u * (p as i64).pow(e)).into())
                    })
                    .collect();
                ProjPoint::padic(p, v)
            }
            None => {
                let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                // bias part of the sample towards faces of the cube
                if rng.gen_bool(0.5) {
                    let k = rng.gen_range(0..n);
                    v[k] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                }
                ProjPoint::real(v)
            }
        };
        if let Ok(pt) = pt {
            out.push(pt);
        }
    }
    out
}

/// Index `k` when `x` is the `k`-th coordinate line and `h = {x_k = 0}`.
pub fn coordinate_aligned(x: &ProjPoint, h: &ProjHyperplane) -> Option<usize> {
    let is_basis = |c: &Coords| -> Option<usize> {
        match c {
            Coords::Real(v) => {
                let nz: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
                (nz.len() == 1).then(|| nz[0])
            }
            Coords::Padic { v, .. } => {
                let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
                (nz.len() == 1).then(|| nz[0])
            }
            Coords::Complex(_) => None,
        }
    };
    let k = is_basis(&x.coords)?;
    (is_basis(&h.functional)? == k).then_some(k)
}

/// Smallest value `c(ε)` that `d(x, {x_k = 0})` can take subject to `≥ ε`:
/// `ε` itself over ℝ, `p^{−⌊log_p(1/ε)⌋}` over ℚ_p.
pub fn aligned_floor(field: &FieldDesc, eps: f64) -> f64 {
    match field.prime() {
        Some(p) => (p as f64).powi(-(padic_floor_exp(p, eps) as i32)),
        None => eps,
    }
}

/// `⌊log_p(1/ε)⌋`, computed without floating rounding at exact powers of `p`.
pub fn padic_floor_exp(p: u64, eps: f64) -> u32 {
    let mut k = 0u32;
    let mut pk = 1.0f64;
    while pk * (p as f64) * eps <= 1.0 + 1e-12 {
        pk *= p as f64;
        k += 1;
    }
    k
}

/// Estimate of the constant `r_ε` of the contraction lemma.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct REps {
    pub value: f64,
    /// `true` when `value` is the exact closed form (coordinate-aligned case).
    pub exact: bool,
    pub samples: usize,
    /// Certified upper bound, when available.
    pub upper_bound: Option<f64>,
}

/// `r_ε = 2·sup |log|t_v||` over unit `v` with `d([v], X₀⁻) ≥ ε`, `v ∈ t_v·v₀ + V₀`.
pub fn r_eps(x0: &ProjPoint, h0: &ProjHyperplane, eps: f64, field: &FieldDesc, grid: SampleGrid) -> Result<REps> {
    let sep = hyperplane_distance(x0, h0)?;
    if !(eps > 0.0) || sep < 2.0 * eps - 1e-15 {
        return Err(Error::precondition(format!("d(x0+, X0-) = {sep} < 2ε = {}", 2.0 * eps)));
    }
    if coordinate_aligned(x0, h0).is_some() {
        let c = aligned_floor(field, eps);
        let value = -2.0 * c.ln();
        return Ok(REps { value, exact: true, samples: 0, upper_bound: Some(value) });
    }
    let (f, v0) = match (&h0.functional, &x0.coords) {
        (Coords::Real(f), Coords::Real(v0)) => (f.clone(), v0.clone()),
        _ => return Err(Error::unsupported("sampled r_eps outside the real coordinate-aligned cases")),
    };
    let fv0: f64 = f.iter().zip(&v0).map(|(a, b)| a * b).sum();
    let f1: f64 = f.iter().map(|x| x.abs()).sum();
    let mut sup = 0.0f64;
    let mut count = 0;
    for x in sample_points(field, x0.dim(), grid) {
        if hyperplane_distance(&x, h0)? < eps {
            continue;
        }
        let v = x.to_f64();
        let t: f64 = f.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / fv0;
        sup = sup.max(t.abs().ln().abs());
        count += 1;
    }
    // ε ≤ d ≤ 2|f(v)|/‖f‖₁ bounds |t| below; ‖v‖ = 1 bounds it above.
    let lo = eps * f1 / (2.0 * fv0.abs());
    let hi = f1 / fv0.abs();
    let bound = 2.0 * lo.ln().abs().max(hi.ln().abs());
    Ok(REps { value: 2.0 * sup, exact: false, samples: count, upper_bound: Some(bound) })
}

/// Outcome of the ε-proximality test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsVerdict {
    pub holds: bool,
    /// `d(x⁺, X⁻)`.
    pub separation: f64,
    pub condition1: bool,
    /// `true` when condition (2) was proved by the analytic bound rather than sampled.
    pub certified: bool,
    pub certificate_bound: Option<f64>,
    pub samples_tested: usize,
    /// Largest `d(g·x, x⁺)` over tested samples.
    pub worst_sample: f64,
}

/// Conditions (1) `d(x⁺, X⁻) ≥ 2ε` and (2) `d(x, X⁻) ≥ ε ⇒ d(g·x, x⁺) ≤ ε`.
///
/// In the coordinate-aligned case `g = diag(λ, B)` and condition (2) follows
/// from `‖B‖ / (|λ|·c(ε)) ≤ ε`; otherwise it is checked on the sample grid.
pub fn eps_proximal_check(pd: &ProximalData, g: &Matrix, eps: f64, field: &FieldDesc, grid: SampleGrid) -> EpsVerdict {
    let mut out = EpsVerdict {
        holds: false,
        separation: 0.0,
        condition1: false,
        certified: false,
        certificate_bound: None,
        samples_tested: 0,
        worst_sample: 0.0,
    };
    let Ok(sep) = hyperplane_distance(&pd.x_plus, &pd.x_minus) else {
        return out;
    };
    out.separation = sep;
    out.condition1 = sep >= 2.0 * eps;
    if !out.condition1 {
        return out;
    }
    if let Some(k) = coordinate_aligned(&pd.x_plus, &pd.x_minus) {
        if let Some(bound) = aligned_contraction_bound(g, k, field, eps) {
            out.certificate_bound = Some(bound);
            if bound <= eps {
                out.certified = true;
                out.holds = true;
                return out;
            }
        }
    }
    for x in sample_points(field, pd.x_plus.dim(), grid) {
        match hyperplane_distance(&x, &pd.x_minus) {
            Ok(d) if d >= eps => {}
            _ => continue,
        }
        let Ok(gx) = apply(g, &x) else { continue };
        let d = proj_distance(&gx, &pd.x_plus).unwrap_or(f64::INFINITY);
        out.samples_tested += 1;
        out.worst_sample = out.worst_sample.max(d);
    }
    out.holds = out.samples_tested > 0 && out.worst_sample <= eps;
    out
}

/// `‖B‖ / (|λ|·c(ε))` for `g` preserving `e_k` and `{x_k = 0}`; `None` otherwise.
fn aligned_contraction_bound(g: &Matrix, k: usize, field: &FieldDesc, eps: f64) -> Option<f64> {
    let n = g.nrows();
    let c = aligned_floor(field, eps);
    match (field.prime(), g) {
        (Some(p), Matrix::Rational(m)) => {
            if (0..n).any(|i| i != k && (!m[(i, k)].is_zero() || !m[(k, i)].is_zero())) {
                return None;
            }
            let lam = val_p(&m[(k, k)], p)?;
            let b = (0..n)
                .filter(|&i| i != k)
                .flat_map(|i| (0..n).filter(move |&j| j != k).map(move |j| (i, j)))
                .filter_map(|(i, j)| val_p(&m[(i, j)], p))
                .min();
            let pf = p as f64;
            Some(match b {
                None => 0.0,
                Some(b) => pf.powi(-(b as i32)) / (pf.powi(-(lam as i32)) * c),
            })
        }
        (None, m) => {
            let r = m.to_real().ok()?;
            if (0..n).any(|i| i != k && (r[(i, k)] != 0.0 || r[(k, i)] != 0.0)) {
                return None;
            }
            let lam = r[(k, k)].abs();
            let b = (0..n)
                .filter(|&i| i != k)
                .map(|i| (0..n).filter(|&j| j != k).map(|j| r[(i, j)].abs()).sum::<f64>())
                .fold(0.0f64, f64::max);
            Some(b / (lam * c))
        }
        _ => None,
    }
}

/// Logarithm of the operator norm for the sup-norm: max row `ℓ¹` norm over ℝ,
/// `max |entry|_p` over ℚ_p (exactly `p^{−min ω}`).
pub fn log_sup_op_norm(g: &Matrix, field: &FieldDesc) -> Result<f64> {
    match field.prime() {
        Some(p) => Ok(padic_norm_exponent(g, p)? as f64 * (p as f64).ln()),
        None => {
            let r = g.to_real()?;
            let n = (0..r.nrows()).map(|i| r.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
            Ok(n.ln())
        }
    }
}

/// `−min ω(entries)`: the base-`p` log of the sup operator norm.
pub fn padic_norm_exponent(g: &Matrix, p: u64) -> Result<i64> {
    match g {
        Matrix::Rational(m) => m
            .entries()
            .iter()
            .filter_map(|x| val_p(x, p))
            .min()
            .map(|v| -v)
            .ok_or_else(|| Error::invalid("zero matrix")),
        _ => Err(Error::invalid("p-adic norms need rational entries")),
    }
}

/// Whether `k` preserves the sup-norm: signed permutations over ℝ,
/// `GL_n(ℤ_p)` over ℚ_p.
pub fn is_sup_isometry(k: &Matrix, field: &FieldDesc) -> bool {
    match (field.prime(), k) {
        (Some(p), Matrix::Rational(m)) => {
            m.entries().iter().all(|x| val_p(x, p).is_none_or(|v| v >= 0)) && val_p(&m.det(), p) == Some(0)
        }
        (Some(_), _) => false,
        (None, m) => {
            let Ok(r) = m.to_real() else { return false };
            let n = r.nrows();
            let perm_rows = (0..n).all(|i| {
                let nz: Vec<f64> = r.row(i).iter().copied().filter(|x| *x != 0.0).collect();
                nz.len() == 1 && nz[0].abs() == 1.0
            });
            let perm_cols = (0..n).all(|j| r.column(j).iter().filter(|x| **x != 0.0).count() == 1);
            perm_rows && perm_cols
        }
    }
}

/// Result of the product contraction check, in natural-log units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    /// `log` of `e^{−(n−1)r_ε} ∏‖z_i‖`.
    pub lower: f64,
    /// `log ‖z₁k₂z₂⋯k_nz_n‖`.
    pub value: f64,
    /// `log ∏‖z_i‖`.
    pub upper: f64,
    pub r_eps: f64,
    pub r_eps_exact: bool,
    pub pass: bool,
    /// Pass/fail against the certified upper bound for `r_ε`, when one exists.
    pub pass_with_bound: Option<bool>,
}

/// Relative tolerance for floating sandwich comparisons.
pub const SANDWICH_TOL: f64 = 1e-9;

/// Checks `e^{−(n−1)r_ε}∏‖z_i‖ ≤ ‖z₁k₂z₂⋯k_nz_n‖ ≤ ∏‖z_i‖` after verifying the hypotheses.
///
/// `k` lists `k₂, …, k_n`. Every `z_i` must be ε-proximal with the same
/// attracting line and repelling hyperplane as `z₁` and act on the line by a
/// homothety of ratio `‖z_i‖`; every `k_i` must be an isometry with
/// `d(k_i·x₀⁺, X₀⁻) ≥ 2ε`. A violated hypothesis is an error naming the index.
pub fn product_sandwich_check(z: &[Matrix], k: &[Matrix], eps: f64, field: &FieldDesc, grid: SampleGrid) -> Result<SandwichReport> {
    if z.is_empty() {
        return Err(Error::invalid("empty product"));
    }
    if k.len() + 1 != z.len() {
        return Err(Error::invalid(format!("{} factors need {} isometries, got {}", z.len(), z.len() - 1, k.len())));
    }
    let pre = |msg: String| Error::precondition(msg);
    let mut data: Vec<ProximalData> = Vec::with_capacity(z.len());
    for (i, zi) in z.iter().enumerate() {
        let pd = proximal_analyze(zi, field)?
            .data()
            .cloned()
            .ok_or_else(|| pre(format!("z[{}] is not proximal", i + 1)))?;
        if !eps_proximal_check(&pd, zi, eps, field, grid).holds {
            return Err(pre(format!("z[{}] is not {eps}-proximal", i + 1)));
        }
        if let Some(first) = data.first() {
            let same_x = proj_distance(&pd.x_plus, &first.x_plus)? <= 1e-9;
            let same_h = proj_distance(
                &ProjPoint { coords: pd.x_minus.functional.clone() },
                &ProjPoint { coords: first.x_minus.functional.clone() },
            )? <= 1e-9;
            if !(same_x && same_h) {
                return Err(pre(format!("z[{}] has a different attracting point or repelling hyperplane", i + 1)));
            }
        }
        // homothety ratio on x⁺ must equal the operator norm
        let lam = crate::fields::abs_value(&pd.lambda, field)?;
        let norm = log_sup_op_norm(zi, field)?;
        if (lam.ln() - norm).abs() > SANDWICH_TOL * (1.0 + norm.abs()) {
            return Err(pre(format!("z[{}] acts on x0+ with ratio {lam}, not its norm {}", i + 1, norm.exp())));
        }
        data.push(pd);
    }
    let x0 = data[0].x_plus.clone();
    let h0 = data[0].x_minus.clone();
    for (i, ki) in k.iter().enumerate() {
        if !is_sup_isometry(ki, field) {
            return Err(pre(format!("k[{}] is not a sup-norm isometry", i + 2)));
        }
        let d = hyperplane_distance(&apply(ki, &x0)?, &h0)?;
        if d < 2.0 * eps {
            return Err(pre(format!("k[{}]·x0+ lies within {d} < 2ε of X0-", i + 2)));
        }
    }
    let r = r_eps(&x0, &h0, eps, field, grid)?;
    let mut prod = z[0].clone();
    for (ki, zi) in k.iter().zip(&z[1..]) {
        prod = prod.mul(ki)?.mul(zi)?;
    }
    let n1 = (z.len() - 1) as f64;
    let (lower, value, upper, pass) = match field.prime() {
        Some(p) => {
            let lp = (p as f64).ln();
            let up: i64 = z.iter().map(|zi| padic_norm_exponent(zi, p)).sum::<Result<i64>>()?;
            let val = padic_norm_exponent(&prod, p)?;
            // r_ε in base-p units is the even integer 2⌊log_p(1/ε)⌋
            let r_int = 2 * padic_floor_exp(p, eps) as i64;
            let low = up - (z.len() as i64 - 1) * r_int;
            (low as f64 * lp, val as f64 * lp, up as f64 * lp, low <= val && val <= up)
        }
        None => {
            let up: f64 = z.iter().map(|zi| log_sup_op_norm(zi, field)).sum::<Result<f64>>()?;
            let val = log_sup_op_norm(&prod, field)?;
            let low = up - n1 * r.value;
            let tol = SANDWICH_TOL * (1.0 + up.abs());
            (low, val, up, low <= val + tol && val <= up + tol)
        }
    };
    let pass_with_bound = r.upper_bound.map(|b| upper - n1 * b <= value + SANDWICH_TOL * (1.0 + upper.abs()) && value <= upper + SANDWICH_TOL * (1.0 + upper.abs()));
    Ok(SandwichReport { lower, value, upper, r_eps: r.value, r_eps_exact: r.exact, pass, pass_with_bound })
}

/// `|⟨ω_{i₀}, μ(g₁⋯g_n) − Σ μ(g_i)⟩|`.
pub fn chi_mu_gap(gs: &[GroupElement], i0: usize) -> Result<f64> {
    let first = gs.first().ok_or_else(|| Error::invalid("empty product"))?;
    let mut prod = first.clone();
    let mut sum = weight_pairing(i0, &cartan(first)?)?;
    for g in &gs[1..] {
        prod = prod.mul(g)?;
        sum += weight_pairing(i0, &cartan(g)?)?;
    }
    Ok((weight_pairing(i0, &cartan(&prod)?)? - sum).abs())
}

/// Exact integer version of [`chi_mu_gap`] for p-adic elements.
pub fn chi_mu_gap_exact(gs: &[GroupElement], i0: usize) -> Result<i64> {
    use crate::cartan::weight_pairing_exact;
    let first = gs.first().ok_or_else(|| Error::invalid("empty product"))?;
    let mut prod = first.clone();
    let mut sum = weight_pairing_exact(i0, &cartan(first)?)?;
    for g in &gs[1..] {
        prod = prod.mul(g)?;
        sum += weight_pairing_exact(i0, &cartan(g)?)?;
    }
    Ok((weight_pairing_exact(i0, &cartan(&prod)?)? - sum).abs())
}

/// `diag(λ, B)` with `λ` in position `k`: a convenience for aligned instances.
pub fn aligned_block(lambda: BigRational, b: &QMat, k: usize) -> QMat {
    let n = b.nrows() + 1;
    let idx = |i: usize| if i < k { i } else { i - 1 };
    ExactMat::from_fn(n, n, |i, j| {
        if i == k && j == k {
            lambda.clone()
        } else if i == k || j == k {
            BigRational::zero()
        } else {
            b[(idx(i), idx(j))].clone()
        }
    })
}

/// Sign-normalized absolute value for reports.
pub fn abs_f64(x: &BigRational) -> f64 {
    rational_to_f64(&x.abs())
}

#[cfg(test)]
mod tests;
