//! Shipped example groups.

use std::f64::consts::E;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::One;

use crate::bending::{boost_y, BendingFamily, GaussianMat, QuadFormSpace, UEmbed, DEFAULT_RADICAND};
use crate::cartan::{GroupDesc, GroupElement};
use crate::error::{Error, Result};
use crate::fields::{FieldDesc, QuadNum};
use crate::linalg::{int, rat, rational_matrix, ExactMat, Matrix, QMat, QuadMat};
use crate::wordgroups::{Presentation, Structure, Word};

/// `[[1, 1], [0, 1]]` over ℝ.
pub fn unipotent() -> Result<GroupElement> {
    GroupElement::new(rational_matrix(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]]), GroupDesc::sl(2, FieldDesc::real())?)
}

/// `diag(3, 1/3)` over ℚ₃.
pub fn padic_diag() -> Result<GroupElement> {
    GroupElement::new(rational_matrix(&[&[(3, 1), (0, 1)], &[(0, 1), (1, 3)]]), GroupDesc::sl(2, FieldDesc::padic(3)?)?)
}

/// Exact rank-two Schottky group in `SL₂(ℚ)`: `a = diag(4, 1/4)`, `b = [[17/8, 15/8], [15/8, 17/8]]`.
pub fn schottky_sl2() -> Result<Presentation> {
    let g = GroupDesc::sl(2, FieldDesc::real())?;
    let a = rational_matrix(&[&[(4, 1), (0, 1)], &[(0, 1), (1, 4)]]);
    let b = rational_matrix(&[&[(17, 8), (15, 8)], &[(15, 8), (17, 8)]]);
    Presentation::free(&["a", "b"], vec![GroupElement::new(a, g.clone())?, GroupElement::new(b, g)?])
}

/// Step that cuts the Schottky words into pieces of one generator's displacement.
pub fn schottky_sl2_step() -> f64 {
    2.0 * 4f64.ln()
}

/// Cyclic group generated by `diag(e², e⁻²)`.
pub fn cyclic_diag() -> Result<Presentation> {
    let g = GroupDesc::sl(2, FieldDesc::real())?;
    let a = Matrix::Real(DMatrix::from_row_slice(2, 2, &[E * E, 0.0, 0.0, 1.0 / (E * E)]));
    Presentation::free(&["a"], vec![GroupElement::new(a, g)?])
}

/// Boost preserving `J_ii x_i² + J_jj x_j²` (with `J_ii > 0 > J_jj`), from the
/// rational parametrization `a = (1 + su²)/(1 − su²)`, `b = 2u/(1 − su²)`, `s = −J_jj/J_ii`.
pub fn pell_boost(space: &QuadFormSpace, i: usize, j: usize, u: BigRational) -> Result<QuadMat> {
    let c = space.coeffs();
    let s = -(c[j].clone() / c[i].clone());
    let u = QuadNum::rational(u);
    let su2 = s.clone() * u.clone() * u.clone();
    let den = QuadNum::one() - su2.clone();
    if num_traits::Zero::is_zero(&den) {
        return Err(Error::invalid("degenerate boost parameter"));
    }
    let a = (QuadNum::one() + su2) / den.clone();
    let b = (QuadNum::rational(int(2)) * u) / den;
    let mut m = ExactMat::identity(space.dim());
    m[(i, i)] = a.clone();
    m[(j, j)] = a;
    m[(i, j)] = s * b.clone();
    m[(j, i)] = b;
    Ok(m.map(|x| x.clone().with_radicand(space.radicand())))
}

/// Rotation in the `(i, j)` plane with cosine `4/5` and sine `3/5`.
pub fn rotation(dim: usize, i: usize, j: usize) -> QuadMat {
    let mut m: QMat = ExactMat::identity(dim);
    m[(i, i)] = rat(4, 5);
    m[(j, j)] = rat(4, 5);
    m[(i, j)] = rat(-3, 5);
    m[(j, i)] = rat(3, 5);
    Matrix::to_quadratic(&m)
}

fn quad(space: &QuadFormSpace, m: QuadMat) -> Result<GroupElement> {
    GroupElement::new(Matrix::Quadratic(m), space.group()?)
}

/// Amalgam `⟨a, c₁⟩ ∗_{c₁ = c₂} ⟨b, c₂⟩` inside `SO(2,2)` of
/// `x₁² + x₂² − √2·x₃² − x₄²`, bent along the `(x₁, x₄)` boost.
///
/// `a` is a boost in `(x₁, x₃)`, `b = RaR⁻¹` for the `(x₁, x₂)` rotation `R`,
/// and `c` is a boost in `(x₂, x₃)`, which commutes with `Y`.
pub fn bending_amalgam() -> Result<BendingFamily> {
    let space = QuadFormSpace::so_m2(2, DEFAULT_RADICAND)?;
    let a = pell_boost(&space, 0, 2, rat(5, 6))?;
    let r = rotation(4, 0, 1);
    let b = r.mul(&a).mul(&r.inverse()?);
    let c = pell_boost(&space, 1, 2, rat(2, 3))?;
    let gens = vec![quad(&space, a)?, quad(&space, c.clone())?, quad(&space, b)?, quad(&space, c)?];
    let pres = Presentation::new(
        ["a", "c1", "b", "c2"].iter().map(|s| s.to_string()).collect(),
        gens,
        Structure::Amalgam { side1: vec![0, 1], side2: vec![2, 3], common: vec![(Word::gen(1), Word::gen(3))] },
        Vec::new(),
    )?;
    BendingFamily::new(pres, space.clone(), boost_y(&space))
}

/// HNN extension of `⟨a, c, c′⟩` with `c′ = RcR⁻¹`, stable letter `ν = R`
/// and pairing `ν·c·ν⁻¹ = c′`.
pub fn bending_hnn() -> Result<BendingFamily> {
    let space = QuadFormSpace::so_m2(2, DEFAULT_RADICAND)?;
    let a = pell_boost(&space, 0, 2, rat(5, 6))?;
    let c = pell_boost(&space, 1, 2, rat(2, 3))?;
    let r = rotation(4, 0, 1);
    let cp = r.mul(&c).mul(&r.inverse()?);
    let gens = vec![quad(&space, a)?, quad(&space, c)?, quad(&space, cp)?, quad(&space, r)?];
    let pres = Presentation::new(
        ["a", "c", "cp", "nu"].iter().map(|s| s.to_string()).collect(),
        gens,
        Structure::Hnn { base: vec![0, 1, 2], stable: 3, pairings: vec![(Word::gen(1), Word::gen(2))] },
        Vec::new(),
    )?;
    BendingFamily::new(pres, space.clone(), boost_y(&space))
}

/// `[[ch, sh], [sh, ch]]` with `ch = (k² + 1)/2k`, `sh = (k² − 1)/2k`.
fn rational_boost(k: i64) -> (BigRational, BigRational) {
    (rat(k * k + 1, 2 * k), rat(k * k - 1, 2 * k))
}

/// Standard `SO(2,1)` Schottky pair (boosts with `k = 9` in the `(x₁, x₃)` and
/// `(x₂, x₃)` planes) placed in `SO(2,2)` as `diag(g, 1)`.
pub fn properness_so21() -> Result<Presentation> {
    let g = GroupDesc::so(2, 2, FieldDesc::real())?;
    let (ch, sh) = rational_boost(9);
    let boost = |i: usize| {
        let mut m = QMat::identity(4);
        m[(i, i)] = ch.clone();
        m[(2, 2)] = ch.clone();
        m[(i, 2)] = sh.clone();
        m[(2, i)] = sh.clone();
        Matrix::Rational(m)
    };
    Presentation::free(&["a", "b"], vec![GroupElement::new(boost(0), g.clone())?, GroupElement::new(boost(1), g)?])
}

fn su11_boost(k: i64) -> GaussianMat {
    let (ch, sh) = rational_boost(k);
    GaussianMat { re: QMat::from_rows(vec![vec![ch.clone(), sh.clone()], vec![sh, ch]]).expect("2x2"), im: QMat::zeros(2, 2) }
}

/// Samples of `U(1,1)` inside `SO(2,2)` along its Cartan axis.
pub fn u11_axis_samples() -> Result<Vec<GroupElement>> {
    let e = UEmbed::new(1)?;
    let g = e.target()?;
    [2, 3, 5, 9, 17]
        .iter()
        .map(|&k| GroupElement::new(Matrix::Rational(e.apply_exact(&su11_boost(k))?), g.clone()))
        .collect()
}

/// Control group inside `H = U(1,1)`: the realification of a Schottky pair
/// `A`, `B = DAD⁻¹` in `SU(1,1)` with `D = diag(u, ū)`, `u = 3/5 + 4i/5`.
pub fn properness_control() -> Result<Presentation> {
    let e = UEmbed::new(1)?;
    let g = e.target()?;
    let a = su11_boost(9);
    let d = GaussianMat { re: ExactMat::diag(vec![rat(3, 5), rat(3, 5)]), im: ExactMat::diag(vec![rat(4, 5), rat(-4, 5)]) };
    let di = GaussianMat { re: d.re.clone(), im: d.im.map(|x| -x.clone()) };
    let b = d.mul(&a).mul(&di);
    Presentation::free(
        &["a", "b"],
        vec![
            GroupElement::new(Matrix::Rational(e.apply_exact(&a)?), g.clone())?,
            GroupElement::new(Matrix::Rational(e.apply_exact(&b)?), g)?,
        ],
    )
}

/// Every shipped example by name.
pub const NAMES: &[&str] = &[
    "unipotent",
    "padic-diag",
    "schottky-sl2",
    "cyclic-diag",
    "bending-amalgam",
    "bending-hnn",
    "properness-so21",
    "properness-control",
];
