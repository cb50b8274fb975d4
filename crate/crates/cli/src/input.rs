//! JSON input files.
//!
//! Scalars are strings in the field's serialization (`"3/4"`, `"1+2*sqrt(2)"`)
//! or JSON numbers, which are read as floating point.

use cartanlab::bending::{boost_y, to_quad, BendingFamily, QuadFormSpace};
use cartanlab::cartan::{Family, GroupDesc, GroupElement};
use cartanlab::fields::{parse_scalar, FieldDesc, FieldKind, QuadNum, Scalar};
use cartanlab::linalg::Matrix;
use cartanlab::stability::{mu_cone, MuCone};
use cartanlab::wordgroups::{Presentation, Structure, Word};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Number(serde_json::Number),
}

pub type MatrixText = Vec<Vec<ScalarText>>;

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GroupSpec {
    Sl {
        n: usize,
    },
    So {
        p: usize,
        q: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        form: Option<Vec<String>>,
    },
    U {
        p: usize,
        q: usize,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureSpec {
    Free,
    Amalgam { side1: Vec<String>, side2: Vec<String>, common: Vec<(String, String)> },
    Hnn { base: Vec<String>, stable: String, pairings: Vec<(String, String)> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum YSpec {
    /// `"boost"` or `"centralizer"`.
    Mode(String),
    Matrix(MatrixText),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct BendingSpec {
    pub y: YSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    /// Whether the side groups are known to be Zariski-dense in `SO(m,1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_assumption: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeSpec {
    /// Group elements whose Cartan projections span the cone.
    Samples(Vec<MatrixText>),
    Rays(Vec<Vec<f64>>),
    Origin,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<MatrixText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<IndexMap<String, MatrixText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relators: Option<Vec<String>>,
    /// Generator images of a second homomorphism, compared against the inclusion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deformed: Option<IndexMap<String, MatrixText>>,
    /// Conjugating element defining the deformed homomorphism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<MatrixText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bending: Option<BendingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

impl InputFile {
    pub fn parse(text: &str, path: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("{path}:{}:{}: {e}", e.line(), e.column())))
    }
}

pub fn group_from_spec(spec: &GroupSpec, field: FieldDesc) -> Result<GroupDesc, CliError> {
    Ok(match spec {
        GroupSpec::Sl { n } => GroupDesc::sl(*n, field)?,
        GroupSpec::So { p, q, form: None } => GroupDesc::so(*p, *q, field)?,
        GroupSpec::So { p, q, form: Some(f) } => {
            let form = f.iter().map(|s| parse_scalar(s, &field)).collect::<Result<Vec<_>, _>>()?;
            GroupDesc::so_with_form(*p, *q, field, form)?
        }
        GroupSpec::U { p, q } => GroupDesc::u(*p, *q)?,
    })
}

pub fn spec_from_group(g: &GroupDesc) -> GroupSpec {
    match g.family() {
        Family::Sl { n } => GroupSpec::Sl { n },
        Family::So { p, q } => GroupSpec::So {
            p,
            q,
            form: if g.has_standard_form() { None } else { Some(g.form().iter().map(|s| s.to_string()).collect()) },
        },
        Family::U { p, q } => GroupSpec::U { p, q },
    }
}

/// Parses `sl:3`, `so:2,2` or `u:1,1`.
pub fn parse_group_flag(s: &str) -> Result<GroupSpec, CliError> {
    let bad = || CliError::Input(format!("bad --group `{s}`; expected sl:N, so:P,Q or u:P,Q"));
    let (head, args) = s.split_once(':').ok_or_else(bad)?;
    let nums: Vec<usize> = args.split(',').map(|a| a.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match (head.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
        ("sl", [n]) => Ok(GroupSpec::Sl { n: *n }),
        ("so", [p, q]) => Ok(GroupSpec::So { p: *p, q: *q, form: None }),
        ("u", [p, q]) => Ok(GroupSpec::U { p: *p, q: *q }),
        _ => Err(bad()),
    }
}

pub fn scalar(s: &ScalarText, field: &FieldDesc) -> Result<Scalar, CliError> {
    match s {
        ScalarText::Text(t) => Ok(parse_scalar(t, field)?),
        ScalarText::Number(n) => {
            if field.is_archimedean() && field.radicand().is_none() {
                n.as_f64().map(Scalar::Real).ok_or_else(|| CliError::Input(format!("bad number {n}")))
            } else {
                // exact fields read JSON numbers through their decimal text
                Ok(parse_scalar(&n.to_string(), field)?)
            }
        }
    }
}

pub fn matrix(m: &MatrixText, field: &FieldDesc) -> Result<Matrix, CliError> {
    let rows = m
        .iter()
        .map(|r| r.iter().map(|s| scalar(s, field)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let out = Matrix::from_scalars(&rows)?;
    if out.nrows() != out.ncols() {
        return Err(CliError::Input(format!("matrix is {}x{}, not square", out.nrows(), out.ncols())));
    }
    Ok(out)
}

pub fn matrix_text(m: &Matrix) -> MatrixText {
    m.rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|s| match s {
                    Scalar::Real(x) => ScalarText::Number(serde_json::Number::from_f64(x).expect("finite")),
                    other => ScalarText::Text(other.to_string()),
                })
                .collect()
        })
        .collect()
}

/// Field and group after command-line overrides.
pub struct Context {
    pub field: FieldDesc,
    pub group: GroupDesc,
}

pub fn context(file: &InputFile, field: Option<FieldDesc>, group: Option<GroupSpec>) -> Result<Context, CliError> {
    let field = match (field, file.field) {
        (Some(f), _) => f,
        (None, Some(k)) => FieldDesc::new(k)?,
        (None, None) => FieldDesc::real(),
    };
    let spec = group
        .or_else(|| file.group.clone())
        .ok_or_else(|| CliError::Input("no group given (input `group` or --group)".into()))?;
    let group = group_from_spec(&spec, field)?;
    Ok(Context { field, group })
}

pub fn elements(file: &InputFile, ctx: &Context) -> Result<(Vec<String>, Vec<Matrix>), CliError> {
    let ms = file.matrices.as_ref().ok_or_else(|| CliError::Input("input has no `matrices`".into()))?;
    let ids = match &file.ids {
        Some(ids) if ids.len() == ms.len() => ids.clone(),
        Some(ids) => return Err(CliError::Input(format!("{} ids for {} matrices", ids.len(), ms.len()))),
        None => (1..=ms.len()).map(|i| format!("m{i}")).collect(),
    };
    let ms = ms.iter().map(|m| matrix(m, &ctx.field)).collect::<Result<Vec<_>, _>>()?;
    Ok((ids, ms))
}

fn index_of(symbols: &[String], s: &str) -> Result<usize, CliError> {
    symbols.iter().position(|x| x == s).ok_or_else(|| CliError::Input(format!("unknown generator `{s}`")))
}

pub fn presentation(file: &InputFile, ctx: &Context) -> Result<Presentation, CliError> {
    let gens = file.generators.as_ref().ok_or_else(|| CliError::Input("input has no `generators`".into()))?;
    let symbols: Vec<String> = gens.keys().cloned().collect();
    let elems = gens
        .iter()
        .map(|(name, m)| {
            GroupElement::new(matrix(m, &ctx.field)?, ctx.group.clone())
                .map_err(|e| CliError::Core(e).context(&format!("generator `{name}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let word = |s: &str| Word::parse(s, &symbols).map_err(CliError::from);
    let idx = |v: &[String]| v.iter().map(|s| index_of(&symbols, s)).collect::<Result<Vec<_>, _>>();
    let pairs = |v: &[(String, String)]| v.iter().map(|(a, b)| Ok((word(a)?, word(b)?))).collect::<Result<Vec<_>, CliError>>();
    let structure = match file.structure.as_ref().unwrap_or(&StructureSpec::Free) {
        StructureSpec::Free => Structure::Free,
        StructureSpec::Amalgam { side1, side2, common } => {
            Structure::Amalgam { side1: idx(side1)?, side2: idx(side2)?, common: pairs(common)? }
        }
        StructureSpec::Hnn { base, stable, pairings } => {
            Structure::Hnn { base: idx(base)?, stable: index_of(&symbols, stable)?, pairings: pairs(pairings)? }
        }
    };
    let relators = file.relators.iter().flatten().map(|s| word(s)).collect::<Result<Vec<_>, _>>()?;
    Ok(Presentation::new(symbols, elems, structure, relators)?)
}

pub fn deformed_images(file: &InputFile, pres: &Presentation, ctx: &Context) -> Result<Option<Vec<Matrix>>, CliError> {
    let Some(d) = &file.deformed else { return Ok(None) };
    let mut out = Vec::with_capacity(pres.rank());
    for s in pres.symbols() {
        let m = d.get(s).ok_or_else(|| CliError::Input(format!("`deformed` lacks generator `{s}`")))?;
        out.push(matrix(m, &ctx.field)?);
    }
    if d.len() != pres.rank() {
        return Err(CliError::Input("`deformed` names generators outside the presentation".into()));
    }
    Ok(Some(out))
}

pub fn bending_family(file: &InputFile, pres: Presentation, ctx: &Context) -> Result<Option<BendingFamily>, CliError> {
    let Some(spec) = &file.bending else { return Ok(None) };
    let r = ctx
        .field
        .radicand()
        .ok_or_else(|| CliError::Input("bending needs a quadratic field (quadratic:R)".into()))?;
    let coeffs = ctx
        .group
        .form()
        .iter()
        .map(|s| match s {
            Scalar::Quadratic(q) => Ok(q.clone()),
            Scalar::Rational(x) => Ok(QuadNum::rational(x.clone())),
            other => Err(CliError::Input(format!("form coefficient {other} is not exact"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let space = QuadFormSpace::new(coeffs, r)?;
    let fam = match &spec.y {
        YSpec::Mode(m) if m == "boost" => BendingFamily::new(pres, space.clone(), boost_y(&space))?,
        YSpec::Mode(m) if m == "centralizer" => BendingFamily::with_centralizer(pres, space)?,
        YSpec::Mode(m) => return Err(CliError::Input(format!("unknown Y mode `{m}`; expected boost or centralizer"))),
        YSpec::Matrix(m) => BendingFamily::new(pres, space, to_quad(&matrix(m, &ctx.field)?)?)?,
    };
    Ok(Some(fam))
}

pub fn cone(file: &InputFile, ctx: &Context) -> Result<MuCone, CliError> {
    match file.cone.as_ref().ok_or_else(|| CliError::Input("input has no `cone`".into()))? {
        ConeSpec::Origin => Ok(MuCone::origin()),
        ConeSpec::Rays(r) => Ok(MuCone::from_rays(r.clone())?),
        ConeSpec::Samples(ms) => {
            let els = ms
                .iter()
                .map(|m| Ok(GroupElement::new(matrix(m, &ctx.field)?, ctx.group.clone())?))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(mu_cone(&els)?)
        }
    }
}
