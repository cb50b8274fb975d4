//! Deformation stability of Cartan projections and desk-scale properness margins.
//!
//! Envelope fits split the sample at a cutoff `ρ₀`: the intercept comes from
//! elements with `‖μ‖ ≤ ρ₀`, the slope from the rest.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cartan::{cartan, euclid, Chamber, CartanVector, GroupDesc, GroupElement};
use crate::error::{Error, Result};
use crate::par;
use crate::wordgroups::{check_relators, word_ball, Ball, Homomorphism, Presentation};

/// Tolerance for the constancy of `⟨α, μ(ℓ_t)⟩ / ‖μ(ℓ_t)‖` along a half-line.
pub const RATIO_TOL: f64 = 1e-8;
/// Samples with `‖μ‖` below this count as the origin.
pub const ZERO_NORM: f64 = 1e-9;

/// Simple roots of the chamber in Cartan coordinates.
pub fn simple_roots(chamber: Chamber, dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..dim.saturating_sub(1) {
        let mut a = vec![0.0; dim];
        a[i] = 1.0;
        a[i + 1] = -1.0;
        out.push(a);
    }
    if chamber == Chamber::TypeBc && dim > 0 {
        let mut a = vec![0.0; dim];
        a[dim - 1] = 1.0;
        out.push(a);
    }
    out
}

/// Fundamental weights `χ_α`, dual to the simple coroots.
pub fn fundamental_weights(chamber: Chamber, dim: usize) -> Vec<Vec<f64>> {
    let k = match chamber {
        Chamber::TypeA => dim.saturating_sub(1),
        Chamber::TypeBc => dim,
    };
    (1..=k)
        .map(|i| {
            let mut w: Vec<f64> = (0..dim).map(|j| if j < i { 1.0 } else { 0.0 }).collect();
            if chamber == Chamber::TypeA {
                let shift = i as f64 / dim as f64;
                w.iter_mut().for_each(|x| *x -= shift);
            }
            w
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The data `(Δ_L, t_α^±, pr_{E_{Δ_L}}, c)` attached to an embedded rank-one `L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaLData {
    pub chamber: Chamber,
    pub dim: usize,
    /// Unit `μ` direction of the positive half-line.
    pub axis_plus: Vec<f64>,
    pub axis_minus: Vec<f64>,
    pub t_plus: Vec<f64>,
    pub t_minus: Vec<f64>,
    /// Indices of the simple roots with `t_α^+ > 0` and `t_α^- > 0`.
    pub delta_l: Vec<usize>,
    /// Orthogonal projection onto `E_{Δ_L}`, row-major.
    pub projection: Vec<Vec<f64>>,
    pub c: f64,
    /// Largest spread of the ratios along a half-line.
    pub ratio_spread: f64,
}

impl DeltaLData {
    fn proj(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.projection[i][j])
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        (self.proj() * DVector::from_column_slice(v)).iter().copied().collect()
    }

    /// `Σ_{α ∈ Δ_L} |⟨χ_α, v⟩|`.
    pub fn weight_sum(&self, v: &[f64]) -> f64 {
        let w = fundamental_weights(self.chamber, self.dim);
        self.delta_l.iter().map(|&a| dot(&w[a], v).abs()).sum()
    }

    /// Two-sided equivalence of the seminorm with the weight sum, evaluated on `pr(v)`.
    pub fn equivalence_holds(&self, v: &[f64], tol: f64) -> bool {
        let p = self.project(v);
        let n = euclid(&p);
        let s = self.weight_sum(&p);
        s / self.c <= n + tol * (1.0 + n) && n <= self.c * s + tol * (1.0 + n)
    }
}

/// Reads `t_α^±` off axis samples `(t, ℓ_t)`; the sign of `t` selects the half-line.
pub fn delta_l_constants(samples: &[(f64, GroupElement)], g: &GroupDesc) -> Result<DeltaLData> {
    let chamber = g.chamber();
    let dim = g.cartan_dim();
    let roots = simple_roots(chamber, dim);
    let mut ratios: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    let mut axes: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    for (t, l) in samples {
        if l.group() != g {
            return Err(Error::invalid("axis sample lies in another group"));
        }
        let mu = cartan(l)?;
        let n = mu.norm();
        if n < ZERO_NORM || *t == 0.0 {
            continue;
        }
        let side = usize::from(*t < 0.0);
        ratios[side].push(roots.iter().map(|a| dot(a, &mu.coords) / n).collect());
        axes[side].push(mu.coords.iter().map(|x| x / n).collect());
    }
    let mut spread: f64 = 0.0;
    let mut consts = Vec::new();
    for side in 0..2 {
        if ratios[side].len() < 3 {
            return Err(Error::precondition(format!(
                "need at least 3 nontrivial samples on the {} half-line, got {}",
                ["positive", "negative"][side],
                ratios[side].len()
            )));
        }
        let first = ratios[side][0].clone();
        for r in &ratios[side] {
            for (x, y) in r.iter().zip(&first) {
                spread = spread.max((x - y).abs());
            }
        }
        consts.push(first);
    }
    if spread > RATIO_TOL {
        return Err(Error::precondition(format!(
            "root ratios vary along the axis (spread {spread:.3e}); embedding is not axis-aligned"
        )));
    }
    let t_minus = consts.pop().unwrap();
    let t_plus = consts.pop().unwrap();
    let delta_l: Vec<usize> = (0..roots.len()).filter(|&i| t_plus[i] > RATIO_TOL && t_minus[i] > RATIO_TOL).collect();
    let projection = projection_onto(&delta_l.iter().map(|&i| roots[i].clone()).collect::<Vec<_>>(), dim);
    let mut d = DeltaLData {
        chamber,
        dim,
        axis_plus: axes[0][0].clone(),
        axis_minus: axes[1][0].clone(),
        t_plus,
        t_minus,
        delta_l,
        projection: (0..dim).map(|i| (0..dim).map(|j| projection[(i, j)]).collect()).collect(),
        c: 1.0,
        ratio_spread: spread,
    };
    d.c = equivalence_constant(&d, &roots);
    Ok(d)
}

fn projection_onto(span: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    if span.is_empty() {
        return DMatrix::zeros(dim, dim);
    }
    let a = DMatrix::from_fn(dim, span.len(), |i, j| span[j][i]);
    let gram = a.transpose() * &a;
    let inv = gram.try_inverse().expect("simple roots are independent");
    &a * inv * a.transpose()
}

/// `c = max(1, max ‖b_β‖, max_s ‖pr Σ s_α χ_α‖)` with `b_β` the basis of
/// `E_{Δ_L}` dual to the weights; both inequalities follow from the triangle
/// and Cauchy–Schwarz inequalities.
fn equivalence_constant(d: &DeltaLData, roots: &[Vec<f64>]) -> f64 {
    let w = fundamental_weights(d.chamber, d.dim);
    let k = d.delta_l.len();
    let mut c: f64 = 1.0;
    // coroot basis scaled so that ⟨χ_α, b_α⟩ = 1
    for &a in &d.delta_l {
        let s = dot(&w[a], &roots[a]);
        c = c.max(euclid(&roots[a]) / s.abs());
    }
    for mask in 0..(1u64 << k) {
        let mut sum = vec![0.0; d.dim];
        for (bit, &a) in d.delta_l.iter().enumerate() {
            let s = if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
            sum.iter_mut().zip(&w[a]).for_each(|(x, y)| *x += s * y);
        }
        c = c.max(euclid(&d.project(&sum)));
    }
    c
}

/// `|v|_{E_{Δ_L}} = ‖pr_{E_{Δ_L}}(v)‖`.
pub fn seminorm(v: &[f64], d: &DeltaLData) -> Result<f64> {
    if v.len() != d.dim {
        return Err(Error::DimensionMismatch { expected: d.dim, got: v.len() });
    }
    Ok(euclid(&d.project(v)))
}

/// A subspace of Euclidean space, stored by an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    dim: usize,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn span(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            let mut u = v.clone();
            for b in &basis {
                let c = dot(&u, b);
                u.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let n = euclid(&u);
            if n > 1e-12 * (1.0 + euclid(v)) {
                basis.push(u.into_iter().map(|x| x / n).collect());
            }
        }
        Ok(Subspace { dim, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for b in &self.basis {
            let c = dot(v, b);
            out.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
        }
        out
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        euclid(&crate::cartan::sub(v, &self.project(v))) <= tol * (1.0 + euclid(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeGap {
    pub in_class: bool,
    /// `(‖x′ − x‖ − 4C″/δ) / ‖x‖`.
    pub bound: f64,
}

/// Membership of `(x, x′)` in the class `I_δ` and its normalized bound.
pub fn cone_gap(x: &[f64], xp: &[f64], e1: &Subspace, delta: f64, c2: f64) -> Result<ConeGap> {
    if !(delta > 0.0) || !(c2 >= 0.0) {
        return Err(Error::invalid("need δ > 0 and C″ ≥ 0"));
    }
    if x.len() != e1.ambient_dim() || xp.len() != e1.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: e1.ambient_dim(), got: x.len() });
    }
    let nx = euclid(x);
    if nx == 0.0 {
        return Err(Error::precondition("bound is undefined at x = 0"));
    }
    let diff = crate::cartan::sub(xp, x);
    let slack = 1e-12 * (1.0 + nx);
    let in_class = e1.contains(x, 1e-12)
        && euclid(&e1.project(&diff)) <= 2.0 * delta * nx + c2 + slack
        && euclid(xp) <= (1.0 + delta) * nx + c2 + slack;
    Ok(ConeGap { in_class, bound: (euclid(&diff) - 4.0 * c2 / delta) / nx })
}

/// Largest bound over generated in-class pairs with `‖x‖ ≥ C″/δ`.
///
/// Each base point is paired with the extremal `x′` (its `E₁` part shrunk
/// by the full allowance, the rest of the norm budget spent orthogonally)
/// and with random admissible perturbations.
pub fn cone_gap_sup(e1: &Subspace, delta: f64, c2: f64, pairs: usize, seed: u64) -> Result<f64> {
    let dim = e1.ambient_dim();
    if e1.dim() == 0 {
        return Err(Error::invalid("E₁ must be nonzero"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup = f64::NEG_INFINITY;
    let floor = (c2 / delta).max(1.0);
    for k in 0..pairs {
        let coef: Vec<f64> = (0..e1.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut x = vec![0.0; dim];
        for (c, b) in coef.iter().zip(&e1.basis) {
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += c * bi);
        }
        let n = euclid(&x);
        if n < 1e-6 {
            continue;
        }
        let scale = floor * (1.0 + 1000.0 * (k as f64 / pairs.max(1) as f64).powi(2));
        x.iter_mut().for_each(|v| *v *= scale / n);
        let nx = scale;
        let budget = (1.0 + delta) * nx + c2;
        let s = ((2.0 * delta * nx + c2) / nx).min(1.0);
        let mut xp: Vec<f64> = x.iter().map(|v| (1.0 - s) * v).collect();
        let orth = orthogonal_direction(e1, &mut rng);
        let room = (budget * budget - ((1.0 - s) * nx).powi(2)).max(0.0).sqrt();
        if let Some(o) = &orth {
            xp.iter_mut().zip(o).for_each(|(a, b)| *a += room * b);
        }
        let mut candidates = vec![xp];
        // random admissible pair
        let r: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rn = euclid(&r).max(1e-12);
        let len = rng.gen_range(0.0..1.0) * (delta * nx + c2);
        candidates.push(x.iter().zip(&r).map(|(a, b)| a + len * b / rn).collect());
        for xp in candidates {
            let g = cone_gap(&x, &xp, e1, delta, c2)?;
            if g.in_class {
                sup = sup.max(g.bound);
            }
        }
    }
    Ok(sup)
}

fn orthogonal_direction(e1: &Subspace, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    for _ in 0..16 {
        let r: Vec<f64> = (0..e1.ambient_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let o = crate::cartan::sub(&r, &e1.project(&r));
        let n = euclid(&o);
        if n > 1e-6 {
            return Some(o.into_iter().map(|x| x / n).collect());
        }
    }
    None
}

/// One ball element of a stability scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRow {
    pub word: String,
    pub length: usize,
    pub mu_norm: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub radius: usize,
    pub rho0: f64,
    pub policy: &'static str,
    pub eps_hat: f64,
    pub c_hat: f64,
    pub rows: Vec<StabilityRow>,
}

pub const ENVELOPE_POLICY: &str = "cutoff-split";

impl StabilityReport {
    /// Every row lies under `ε̂‖μ‖ + Ĉ`.
    pub fn envelope_valid(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.deviation <= self.eps_hat * r.mu_norm + self.c_hat + tol * (1.0 + r.mu_norm))
    }

    /// Refits the envelope at another cutoff.
    pub fn refit(&self, rho0: f64) -> (f64, f64) {
        fit_upper(&self.rows.iter().map(|r| (r.mu_norm, r.deviation)).collect::<Vec<_>>(), rho0)
    }
}

fn fit_upper(rows: &[(f64, f64)], rho0: f64) -> (f64, f64) {
    let c = rows.iter().filter(|r| r.0 <= rho0).map(|r| r.1).fold(0.0, f64::max);
    let e = rows.iter().filter(|r| r.0 > rho0).map(|r| (r.1 - c) / r.0).fold(0.0, f64::max);
    (e, c)
}

/// Default cutoff: largest generator `‖μ‖` plus one.
pub fn default_rho0(pres: &Presentation, phi: &Homomorphism) -> Result<f64> {
    let mut m: f64 = 0.0;
    for img in phi.images() {
        m = m.max(cartan(&GroupElement::new_unchecked(img.clone(), pres.group().clone()))?.norm());
    }
    Ok(m + 1.0)
}

/// Compares `μ(φ(γ))` with `μ(φ_ref(γ))` over the radius-`R` ball.
pub fn stability_scan(
    pres: &Presentation,
    phi_ref: &Homomorphism,
    phi: &Homomorphism,
    radius: usize,
    rho0: Option<f64>,
) -> Result<StabilityReport> {
    check_homs(pres, phi_ref, phi)?;
    let ball = word_ball(pres, phi_ref, radius)?;
    stability_scan_ball(pres, &ball, phi_ref, phi, rho0)
}

fn check_homs(pres: &Presentation, phi_ref: &Homomorphism, phi: &Homomorphism) -> Result<()> {
    if phi.rank() != pres.rank() || phi_ref.rank() != pres.rank() {
        return Err(Error::invalid("homomorphisms do not match the presentation"));
    }
    for (name, h) in [("reference", phi_ref), ("deformed", phi)] {
        let rep = check_relators(pres, h)?;
        if !rep.pass {
            return Err(Error::precondition(format!(
                "{name} homomorphism fails its relators (max deviation {:.3e})",
                rep.max_deviation
            )));
        }
    }
    Ok(())
}

/// [`stability_scan`] over a ball already enumerated under `phi_ref`.
pub fn stability_scan_ball(
    pres: &Presentation,
    ball: &Ball,
    phi_ref: &Homomorphism,
    phi: &Homomorphism,
    rho0: Option<f64>,
) -> Result<StabilityReport> {
    check_homs(pres, phi_ref, phi)?;
    let rho0 = match rho0 {
        Some(r) => r,
        None => default_rho0(pres, phi_ref)?,
    };
    let images = ball.images_under(phi)?;
    let g = pres.group();
    let idx: Vec<usize> = (0..ball.len()).collect();
    let rows = par::map(&idx, |&i| -> Result<StabilityRow> {
        let e = &ball.entries[i];
        let a = cartan(&GroupElement::new_unchecked(e.matrix.clone(), g.clone()))?;
        let b = cartan(&GroupElement::new_unchecked(images[i].clone(), g.clone()))?;
        Ok(StabilityRow {
            word: pres.format_word(&e.word),
            length: e.word.len(),
            mu_norm: a.norm(),
            deviation: mu_deviation(&a, &b),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (eps_hat, c_hat) = fit_upper(&rows.iter().map(|r| (r.mu_norm, r.deviation)).collect::<Vec<_>>(), rho0);
    let rep = StabilityReport { radius: ball.radius, rho0, policy: ENVELOPE_POLICY, eps_hat, c_hat, rows };
    debug_assert!(rep.envelope_valid(1e-12));
    Ok(rep)
}

fn mu_deviation(a: &CartanVector, b: &CartanVector) -> f64 {
    if let (Some(x), Some(y)) = (&a.lattice, &b.lattice) {
        if x == y {
            return 0.0;
        }
    }
    if a.coords == b.coords {
        return 0.0;
    }
    a.dist(b)
}

/// Finite union of rays in the closed chamber; no rays means `{0}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuCone {
    pub rays: Vec<Vec<f64>>,
    /// Largest angular spread among the sampled directions.
    pub spread: f64,
}

impl MuCone {
    pub fn origin() -> Self {
        MuCone { rays: Vec::new(), spread: 0.0 }
    }

    pub fn from_rays(rays: Vec<Vec<f64>>) -> Result<Self> {
        let rays = rays
            .into_iter()
            .map(|r| {
                let n = euclid(&r);
                if n == 0.0 {
                    Err(Error::invalid("zero ray"))
                } else {
                    Ok(r.into_iter().map(|x| x / n).collect())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MuCone { rays, spread: 0.0 })
    }

    /// Euclidean distance to the cone.
    pub fn distance(&self, x: &[f64]) -> f64 {
        if self.rays.is_empty() {
            return euclid(x);
        }
        self.rays
            .iter()
            .map(|r| {
                let t = dot(x, r).max(0.0);
                euclid(&x.iter().zip(r).map(|(a, b)| a - t * b).collect::<Vec<_>>())
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Tolerance on the spread of sampled `μ(H)` directions.
pub const CONE_SPREAD_TOL: f64 = 1e-8;

/// The ray carrying `μ(H)`, read from samples of `H` inside `G`.
///
/// Within the closed chamber every Weyl image of the sampled ray collapses
/// onto the ray itself, so a rank-one `H` contributes one ray.
pub fn mu_cone(samples: &[GroupElement]) -> Result<MuCone> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for s in samples {
        let mu = cartan(s)?;
        let n = mu.norm();
        if n >= ZERO_NORM {
            dirs.push(mu.coords.iter().map(|x| x / n).collect());
        }
    }
    let Some(first) = dirs.first().cloned() else {
        return Ok(MuCone::origin());
    };
    let spread = dirs.iter().map(|d| euclid(&crate::cartan::sub(d, &first))).fold(0.0, f64::max);
    if spread > CONE_SPREAD_TOL {
        return Err(Error::precondition(format!(
            "sampled μ(H) leaves a single ray (spread {spread:.3e}); axis not aligned with the chamber"
        )));
    }
    Ok(MuCone { rays: vec![first], spread })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropernessRow {
    pub word: String,
    pub mu_norm: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropernessReport {
    pub cone: MuCone,
    pub radius: Option<usize>,
    pub rho0: f64,
    pub policy: &'static str,
    /// Fitted lower-envelope slope, present only when nonnegative.
    pub slope: Option<f64>,
    pub raw_slope: f64,
    pub intercept: f64,
    /// Always "finite-radius": a trend at desk scale, not an asymptotic claim.
    pub certificate: &'static str,
    pub rows: Vec<PropernessRow>,
}

/// Fitted slopes at or below this are treated as flat.
pub const SLOPE_TOL: f64 = 1e-9;

impl PropernessReport {
    /// Slopes within `SLOPE_TOL` of zero count as zero.
    pub fn positive(&self) -> bool {
        self.slope.is_some_and(|s| s > SLOPE_TOL)
    }
}

fn fit_lower(rows: &[(f64, f64)], rho0: f64) -> (f64, f64) {
    let b0 = rows.iter().filter(|r| r.0 <= rho0).map(|r| r.1).fold(f64::INFINITY, f64::min);
    let b0 = if b0.is_finite() { b0 } else { 0.0 };
    let s = rows.iter().filter(|r| r.0 > rho0).map(|r| (r.1 - b0) / r.0).fold(f64::INFINITY, f64::min);
    let s = if s.is_finite() { s } else { 0.0 };
    let b = rows.iter().filter(|r| r.0 <= rho0).map(|r| r.1 - s * r.0).fold(b0, f64::min);
    (s, b)
}

/// Distances of Cartan samples to the cone, with a lower envelope `ŝ‖μ‖ + b̂`.
pub fn properness_margin(samples: &[(String, CartanVector)], cone: &MuCone, rho0: f64) -> Result<PropernessReport> {
    if samples.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    let rows: Vec<PropernessRow> = samples
        .iter()
        .map(|(w, mu)| PropernessRow { word: w.clone(), mu_norm: mu.norm(), margin: cone.distance(&mu.coords) })
        .collect();
    let (s, b) = fit_lower(&rows.iter().map(|r| (r.mu_norm, r.margin)).collect::<Vec<_>>(), rho0);
    Ok(PropernessReport {
        cone: cone.clone(),
        radius: None,
        rho0,
        policy: ENVELOPE_POLICY,
        slope: (s >= 0.0).then_some(s),
        raw_slope: s,
        intercept: b,
        certificate: "finite-radius",
        rows,
    })
}

/// Margins of the radius-`R` ball of `Γ` against the cone of `μ(H)`.
pub fn properness_scan(pres: &Presentation, radius: usize, cone: &MuCone, rho0: Option<f64>) -> Result<PropernessReport> {
    let phi = pres.inclusion();
    let rho0 = match rho0 {
        Some(r) => r,
        None => default_rho0(pres, &phi)?,
    };
    let ball = word_ball(pres, &phi, radius)?;
    let g = pres.group();
    let samples = par::map(&ball.entries, |e| {
        cartan(&GroupElement::new_unchecked(e.matrix.clone(), g.clone())).map(|mu| (pres.format_word(&e.word), mu))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut rep = properness_margin(&samples, cone, rho0)?;
    rep.radius = Some(radius);
    Ok(rep)
}
