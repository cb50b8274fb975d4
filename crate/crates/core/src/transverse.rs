//! Rank-one geometry: displacement in the hyperbolic space or the tree, the
//! transversality gap, and geodesic subdivision of group elements.
//!
//! A word `γ` is cut by walking the geodesic from `x₀′` to `γ⁻¹·x₀′` in steps
//! of length `R` and snapping each cut point to the nearest orbit point
//! `λ_k·x₀′` over a word ball. With `λ₀ = 1` the factors are
//! `γ₀ = γλ_n` and `γ_i = λ_{n−i+1}⁻¹λ_{n−i}`, whose product telescopes to `γ`.

use serde::Serialize;

use crate::cartan::{Family, GroupDesc, GroupElement};
use crate::error::{Error, Result};
use crate::fields::{val_p, FieldKind};
use crate::linalg::{smith_local, ExactMat, Matrix, QMat};
use crate::par;
use crate::wordgroups::{evaluate, word_ball, Ball, Homomorphism, Presentation, Word};

/// Symmetric space or tree of a rank-one group, with base point `x₀`.
#[derive(Clone, Debug, PartialEq)]
pub enum RankOneModel {
    /// `SO(m,1)` acting linearly on `{⟨x,x⟩_J = −1}`; `x₀` is the positive
    /// multiple of the negative basis vector.
    Hyperboloid { form: Vec<f64>, negative: usize },
    /// `SL₂(ℝ)` acting on unimodular positive symmetric matrices by `P ↦ gPgᵀ`,
    /// identified with the hyperboloid of `x₁² + x₂² − x₃²`; `x₀ = I`.
    Sl2,
    /// Bruhat–Tits tree of `SL₂(ℚ_p)`; vertices are lattice classes `h·ℤ_p²`, `x₀ = ℤ_p²`.
    Tree { p: u64 },
}

/// A point of a rank-one model.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelPoint {
    Vector(Vec<f64>),
    /// The lattice spanned by the columns.
    Lattice(QMat),
}

impl RankOneModel {
    /// Hyperboloid of a diagonal form of signature `(m, 1)`.
    pub fn hyperboloid(form: Vec<f64>) -> Result<Self> {
        let neg: Vec<usize> = (0..form.len()).filter(|&i| form[i] < 0.0).collect();
        if form.len() < 2 || neg.len() != 1 || form.iter().any(|&c| c == 0.0 || !c.is_finite()) {
            return Err(Error::invalid("hyperboloid needs a form of signature (m, 1)"));
        }
        Ok(RankOneModel::Hyperboloid { form, negative: neg[0] })
    }

    /// The model attached to a rank-one group: `SL₂(ℝ)`, `SL₂(ℚ_p)` or `SO(m,1)`.
    pub fn for_group(g: &GroupDesc) -> Result<Self> {
        match (g.family(), g.field().kind()) {
            (Family::Sl { n: 2 }, FieldKind::Padic { p }) => Ok(RankOneModel::Tree { p }),
            (Family::Sl { n: 2 }, FieldKind::Real | FieldKind::Quadratic { .. }) => Ok(RankOneModel::Sl2),
            (Family::So { q: 1, .. }, _) => {
                let form = g.form().iter().map(|s| s.to_f64()).collect::<Result<Vec<_>>>()?;
                Self::hyperboloid(form)
            }
            _ => Err(Error::unsupported(format!("no rank-one model for {:?}", g.family()))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RankOneModel::Hyperboloid { .. } => "hyperboloid",
            RankOneModel::Sl2 => "sl2",
            RankOneModel::Tree { .. } => "tree",
        }
    }

    /// `displacement / ‖μ‖`: 1 on `SO(m,1)`, `√2` on `SL₂` (both models).
    pub fn scaling(&self) -> f64 {
        match self {
            RankOneModel::Hyperboloid { .. } => 1.0,
            _ => std::f64::consts::SQRT_2,
        }
    }

    pub fn base_point(&self) -> ModelPoint {
        match self {
            RankOneModel::Hyperboloid { form, negative } => {
                let mut v = vec![0.0; form.len()];
                v[*negative] = 1.0 / form[*negative].abs().sqrt();
                ModelPoint::Vector(v)
            }
            RankOneModel::Sl2 => ModelPoint::Vector(vec![0.0, 0.0, 1.0]),
            RankOneModel::Tree { .. } => ModelPoint::Lattice(QMat::identity(2)),
        }
    }

    fn check_matrix(&self, g: &Matrix) -> Result<()> {
        let n = match self {
            RankOneModel::Hyperboloid { form, .. } => form.len(),
            _ => 2,
        };
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.nrows() });
        }
        if let RankOneModel::Tree { .. } = self {
            if !matches!(g, Matrix::Rational(_)) {
                return Err(Error::invalid("tree elements need rational entries"));
            }
        }
        Ok(())
    }

    /// `g·x`.
    pub fn act(&self, g: &Matrix, x: &ModelPoint) -> Result<ModelPoint> {
        self.check_matrix(g)?;
        match (self, x) {
            (RankOneModel::Hyperboloid { .. }, ModelPoint::Vector(v)) => {
                let r = g.to_real()?;
                Ok(ModelPoint::Vector((0..v.len()).map(|i| (0..v.len()).map(|j| r[(i, j)] * v[j]).sum()).collect()))
            }
            (RankOneModel::Sl2, ModelPoint::Vector(v)) => {
                let r = g.to_real()?;
                let (a, b, c) = (v[2] + v[0], v[1], v[2] - v[0]);
                let q = |i: usize, j: usize| {
                    let x = [[a, b], [b, c]];
                    (0..2).map(|k| (0..2).map(|l| r[(i, k)] * x[k][l] * r[(j, l)]).sum::<f64>()).sum::<f64>()
                };
                let (a, b, c) = (q(0, 0), q(0, 1), q(1, 1));
                Ok(ModelPoint::Vector(vec![(a - c) / 2.0, b, (a + c) / 2.0]))
            }
            (RankOneModel::Tree { .. }, ModelPoint::Lattice(h)) => match g {
                Matrix::Rational(m) => Ok(ModelPoint::Lattice(m.mul(h))),
                _ => unreachable!(),
            },
            _ => Err(Error::invalid("point does not belong to this model")),
        }
    }

    fn pairing(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            RankOneModel::Hyperboloid { form, .. } => form.iter().zip(x.iter().zip(y)).map(|(c, (a, b))| c * a * b).sum(),
            _ => x[0] * y[0] + x[1] * y[1] - x[2] * y[2],
        }
    }

    /// Checks `⟨x, x⟩ = −1` on the upper sheet.
    pub fn on_model(&self, x: &ModelPoint) -> Result<()> {
        if let ModelPoint::Vector(v) = x {
            let q = self.pairing(v, v);
            let scale = v.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            if (q + 1.0).abs() > 1e-9 * scale * scale {
                return Err(Error::precondition(format!("point off the hyperboloid: ⟨x,x⟩ = {q}")));
            }
        }
        Ok(())
    }

    /// Distance in the model. Nearby archimedean points use
    /// `d = 2·asinh(√⟨x−y, x−y⟩ / 2)`, distant ones `acosh(−⟨x, y⟩)`.
    pub fn dist(&self, x: &ModelPoint, y: &ModelPoint) -> Result<f64> {
        match (self, x, y) {
            (RankOneModel::Tree { p }, ModelPoint::Lattice(a), ModelPoint::Lattice(b)) => {
                Ok(tree_displacement(&a.inverse()?.mul(b), *p)? as f64)
            }
            (_, ModelPoint::Vector(a), ModelPoint::Vector(b)) => {
                let c = -self.pairing(a, b);
                if c > 2.0 {
                    return Ok(c.acosh());
                }
                let d: Vec<f64> = a.iter().zip(b).map(|(s, t)| s - t).collect();
                let q = self.pairing(&d, &d).max(0.0);
                Ok(2.0 * (q.sqrt() / 2.0).asinh())
            }
            _ => Err(Error::invalid("points do not belong to this model")),
        }
    }

    /// Point at arclength `s` on the geodesic from `x` towards `y`
    /// (`s` must be an integer on the tree).
    fn along(&self, x: &ModelPoint, y: &ModelPoint, s: f64) -> Result<ModelPoint> {
        match (self, x, y) {
            (RankOneModel::Tree { p }, ModelPoint::Lattice(hx), ModelPoint::Lattice(hy)) => {
                // path x₀ → m·x₀ runs through u⁻¹·diag(1, p^j)·x₀ where u·m·v is diagonal
                let m = hx.inverse()?.mul(hy);
                let sm = smith_local(&m, *p);
                let ui = sm.u.inverse()?;
                let j = s.round() as i64;
                let pj = crate::linalg::int(*p as i64);
                let step = num_traits::pow(pj, j as usize);
                let d = ExactMat::diag(vec![crate::linalg::int(1), step]);
                Ok(ModelPoint::Lattice(hx.mul(&ui).mul(&d)))
            }
            (_, ModelPoint::Vector(a), ModelPoint::Vector(b)) => {
                let c = -self.pairing(a, b);
                let u: Vec<f64> = a.iter().zip(b).map(|(ai, bi)| bi - c * ai).collect();
                let un = self.pairing(&u, &u).max(0.0).sqrt();
                if un == 0.0 {
                    return Ok(x.clone());
                }
                Ok(ModelPoint::Vector(a.iter().zip(&u).map(|(ai, ui)| s.cosh() * ai + s.sinh() * ui / un).collect()))
            }
            _ => Err(Error::invalid("points do not belong to this model")),
        }
    }
}

/// `d(x₀, g·x₀) = ω(det g) − 2·min ω(g_ij)` on the tree of `GL₂(ℚ_p)`.
pub fn tree_displacement(g: &QMat, p: u64) -> Result<i64> {
    let det = val_p(&g.det(), p).ok_or(Error::Singular)?;
    let min = g.entries().iter().filter_map(|x| val_p(x, p)).min().ok_or(Error::Singular)?;
    Ok(det - 2 * min)
}

/// `|μ_L^ℝ(g)| = d(x₀, g·x₀)`.
pub fn displacement(g: &GroupElement, model: &RankOneModel) -> Result<f64> {
    displacement_matrix(g.matrix(), model)
}

pub fn displacement_matrix(g: &Matrix, model: &RankOneModel) -> Result<f64> {
    let x0 = model.base_point();
    let gx = model.act(g, &x0)?;
    model.on_model(&gx)?;
    model.dist(&x0, &gx)
}

/// `|μ(gh)| − |μ(g)| − |μ(h)|`, never positive.
pub fn transversality_gap(g: &GroupElement, h: &GroupElement, model: &RankOneModel) -> Result<f64> {
    let gh = g.mul(h)?;
    Ok(displacement(&gh, model)? - displacement(g, model)? - displacement(h, model)?)
}

/// Result of cutting one word along its geodesic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransverseDecomposition {
    pub word: String,
    pub factors: Vec<String>,
    /// `|μ_L^ℝ(γ_i)|` for `i = 0..=n`.
    pub displacements: Vec<f64>,
    /// `δ_i = |μ(γ_iγ_{i+1})| − |μ(γ_i)| − |μ(γ_{i+1})|` for `i = 0..n`.
    pub gaps: Vec<f64>,
    pub step: f64,
    pub total_displacement: f64,
    pub snap_distances: Vec<f64>,
    /// Smallest `D` for which the proposition's inequalities hold on this run.
    pub d_achieved: f64,
    /// `6·max snap + 6·d(x₀, x₀′)`.
    pub ceiling: f64,
    pub base_offset: f64,
    /// The ordered product of factor images equals the image of the word.
    pub reassembles: bool,
}

impl TransverseDecomposition {
    pub fn n(&self) -> usize {
        self.factors.len().saturating_sub(1)
    }

    /// The bounds of the decomposition with `D = d_achieved + tol`.
    pub fn bounds_hold(&self, tol: f64) -> bool {
        let d = self.d_achieved + tol;
        let r = self.step;
        let first = self.displacements.first().is_none_or(|&x| x <= r + d);
        let rest = self.displacements.iter().skip(1).all(|&x| (r - d..=r + d).contains(&x));
        first && rest && self.gaps.iter().all(|&g| g >= -d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecomposeOptions {
    /// Largest admissible snap distance; defaults to the step `R`.
    pub snap_budget: Option<f64>,
    /// Orbit sample radius; defaults to the word length.
    pub orbit_radius: Option<usize>,
    /// Alternative base point `x₀′`, given by a group element `h` as `h·x₀`.
    pub base_shift: Option<Matrix>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { snap_budget: None, orbit_radius: None, base_shift: None }
    }
}

/// Precomputed orbit sample for decomposing many words.
pub struct Decomposer<'a> {
    pres: &'a Presentation,
    phi: Homomorphism,
    model: RankOneModel,
    ball: Ball,
    x0p: ModelPoint,
    orbit: Vec<ModelPoint>,
    base_offset: f64,
    budget: Option<f64>,
}

impl<'a> Decomposer<'a> {
    pub fn new(pres: &'a Presentation, model: RankOneModel, orbit_radius: usize, opts: &DecomposeOptions) -> Result<Self> {
        let phi = pres.inclusion();
        for g in pres.generators() {
            model.check_matrix(g.matrix())?;
        }
        let ball = word_ball(pres, &phi, orbit_radius)?;
        let x0 = model.base_point();
        let x0p = match &opts.base_shift {
            Some(h) => model.act(h, &x0)?,
            None => x0.clone(),
        };
        model.on_model(&x0p)?;
        let base_offset = model.dist(&x0, &x0p)?;
        let orbit = par::map(&ball.entries, |e| model.act(&e.matrix, &x0p)).into_iter().collect::<Result<Vec<_>>>()?;
        Ok(Decomposer { pres, phi, model, ball, x0p, orbit, base_offset, budget: opts.snap_budget })
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    /// Cuts `gamma` at arclength multiples of `step`.
    pub fn decompose(&self, gamma: &Word, step: f64) -> Result<TransverseDecomposition> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid("step R must be positive"));
        }
        if matches!(self.model, RankOneModel::Tree { .. }) && step.fract() != 0.0 {
            return Err(Error::invalid("tree decompositions need an integer step"));
        }
        let g = evaluate(gamma, &self.phi)?;
        let ginv = g.inverse()?;
        let target = self.model.act(ginv.matrix(), &self.x0p)?;
        let total = self.model.dist(&self.x0p, &target)?;
        let budget = self.budget.unwrap_or(step);
        // cut points at kR for kR < L, leaving a last piece of length in (0, R]
        let slack = 1e-9 * (1.0 + total);
        let mut n = 0usize;
        while (n + 1) as f64 * step < total - slack {
            n += 1;
        }
        let mut lambdas: Vec<usize> = vec![0];
        let mut snaps = Vec::with_capacity(n);
        for k in 1..=n {
            let pt = self.model.along(&self.x0p, &target, k as f64 * step)?;
            let mut best = (f64::INFINITY, 0usize);
            for (i, o) in self.orbit.iter().enumerate() {
                let d = self.model.dist(&pt, o)?;
                if d < best.0 {
                    best = (d, i);
                }
            }
            if best.0 > budget {
                return Err(Error::precondition(format!(
                    "snap distance {:.6} exceeds budget {budget} at cut {k}; orbit sample too sparse",
                    best.0
                )));
            }
            snaps.push(best.0);
            lambdas.push(best.1);
        }
        let w = |i: usize| &self.ball.entries[lambdas[i]].word;
        let mut factors = vec![gamma.concat(w(n))];
        for i in 1..=n {
            factors.push(w(n - i + 1).inverse().concat(w(n - i)));
        }
        let mats = factors.iter().map(|f| evaluate(f, &self.phi)).collect::<Result<Vec<_>>>()?;
        let displacements = mats.iter().map(|m| displacement(m, &self.model)).collect::<Result<Vec<_>>>()?;
        let mut gaps = Vec::with_capacity(n);
        for i in 0..n {
            gaps.push(displacement(&mats[i].mul(&mats[i + 1])?, &self.model)? - displacements[i] - displacements[i + 1]);
        }
        let mut prod = mats[0].clone();
        for m in &mats[1..] {
            prod = prod.mul(m)?;
        }
        let reassembles = match prod.matrix().exact_eq(g.matrix()) {
            Some(b) => b,
            None => prod.matrix().sup_dist(g.matrix()) <= 1e-9 * (1.0 + max_entry(g.matrix())),
        };
        let mut d = (displacements[0] - step).max(0.0);
        for &x in &displacements[1..] {
            d = d.max((x - step).abs());
        }
        for &gap in &gaps {
            d = d.max(-gap);
        }
        let smax = snaps.iter().copied().fold(0.0, f64::max);
        Ok(TransverseDecomposition {
            word: self.pres.format_word(gamma),
            factors: factors.iter().map(|f| self.pres.format_word(f)).collect(),
            displacements,
            gaps,
            step,
            total_displacement: total,
            snap_distances: snaps,
            d_achieved: d,
            ceiling: 6.0 * smax + 6.0 * self.base_offset,
            base_offset: self.base_offset,
            reassembles,
        })
    }
}

fn max_entry(m: &Matrix) -> f64 {
    m.to_complex().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// One-shot decomposition with an orbit sample of radius `|γ|` (or as configured).
pub fn decompose(
    gamma: &Word,
    pres: &Presentation,
    model: &RankOneModel,
    step: f64,
    opts: &DecomposeOptions,
) -> Result<TransverseDecomposition> {
    let radius = opts.orbit_radius.unwrap_or(gamma.len());
    Decomposer::new(pres, model.clone(), radius, opts)?.decompose(gamma, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDesc;
    use crate::linalg::rational_matrix;
    use nalgebra::DMatrix;

    #[test]
    fn sl2_boost_displacement() {
        let t: f64 = 0.7;
        let g = Matrix::Real(DMatrix::from_row_slice(2, 2, &[t.exp(), 0.0, 0.0, (-t).exp()]));
        let d = displacement_matrix(&g, &RankOneModel::Sl2).unwrap();
        assert!((d - 2.0 * t).abs() < 1e-12);
    }

    #[test]
    fn tree_diag_displacement() {
        let g = rational_matrix(&[&[(3, 1), (0, 1)], &[(0, 1), (1, 3)]]);
        assert_eq!(displacement_matrix(&g, &RankOneModel::Tree { p: 3 }).unwrap(), 2.0);
    }

    #[test]
    fn tree_path_vertices() {
        let model = RankOneModel::Tree { p: 3 };
        let g = rational_matrix(&[&[(9, 1), (1, 1)], &[(0, 1), (1, 9)]]);
        let x0 = model.base_point();
        let y = model.act(&g, &x0).unwrap();
        let total = model.dist(&x0, &y).unwrap();
        assert_eq!(total, 4.0);
        for k in 0..=4 {
            let v = model.along(&x0, &y, k as f64).unwrap();
            assert_eq!(model.dist(&x0, &v).unwrap(), k as f64);
            assert_eq!(model.dist(&v, &y).unwrap(), 4.0 - k as f64);
        }
    }

    #[test]
    fn cyclic_axis_is_exact() {
        let g = GroupDesc::sl(2, FieldDesc::real()).unwrap();
        let a = Matrix::Real(DMatrix::from_row_slice(2, 2, &[2f64.exp(), 0.0, 0.0, (-2f64).exp()]));
        let p = Presentation::free(&["a"], vec![GroupElement::new(a, g).unwrap()]).unwrap();
        let w = p.parse_word("a^6").unwrap();
        let d = decompose(&w, &p, &RankOneModel::Sl2, 8.0, &DecomposeOptions::default()).unwrap();
        assert_eq!(d.factors, vec!["a^2", "a^2", "a^2"], "{d:?}");
        assert!(d.d_achieved < 1e-9, "{d:?}");
        assert!(d.gaps.iter().all(|g| g.abs() < 1e-9));
        assert!(d.reassembles);
    }
}
