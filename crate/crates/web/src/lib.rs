//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string; errors surface as JS exceptions.

use cartanlab::bending::{bend, zariski_density_witness};
use cartanlab::cartan::{cartan as mu, GroupDesc, GroupElement};
use cartanlab::catalog;
use cartanlab::fields::{abs_value, parse_scalar, FieldDesc};
use cartanlab::linalg::Matrix;
use cartanlab::projective::{eps_proximal_check, proximal_analyze, SampleGrid};
use cartanlab::stability::stability_scan_ball;
use cartanlab::wordgroups::{check_relators, word_ball};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest ball radius the page may request; exact arithmetic grows quickly.
pub const MAX_RADIUS: usize = 4;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Rows separated by newlines or `;`, entries by whitespace or `,`.
pub fn parse_matrix(text: &str, field: &FieldDesc) -> Result<Matrix, cartanlab::Error> {
    let rows = text
        .split(['\n', ';'])
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| {
            r.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| parse_scalar(s, field))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let m = Matrix::from_scalars(&rows)?;
    if m.nrows() != m.ncols() {
        return Err(cartanlab::Error::InvalidInput(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    Ok(m)
}

fn sl_element(field: &str, text: &str) -> Result<(FieldDesc, GroupElement), cartanlab::Error> {
    let field: FieldDesc = field.parse()?;
    let m = parse_matrix(text, &field)?;
    let g = GroupDesc::sl(m.nrows(), field.clone())?;
    Ok((field, GroupElement::new(m, g)?))
}

pub fn cartan_json(field: &str, text: &str) -> Result<String, cartanlab::Error> {
    let (_, g) = sl_element(field, text)?;
    let v = mu(&g)?;
    Ok(json!({ "mu": v.coords, "lattice": v.lattice, "norm": v.norm() }).to_string())
}

pub fn proximal_json(field: &str, text: &str, eps: f64, seed: u64) -> Result<String, cartanlab::Error> {
    let (field, g) = sl_element(field, text)?;
    let v = proximal_analyze(g.matrix(), &field)?;
    let mut out = json!({ "verdict": v.label() });
    if let Some(pd) = v.data() {
        out["abs_lambda"] = json!(abs_value(&pd.lambda, &field)?);
        out["gap_ratio"] = json!(pd.gap_ratio);
        out["lambda_exact"] = json!(pd.exact);
        if eps > 0.0 {
            let grid = SampleGrid { seed, ..SampleGrid::default() };
            out["eps"] = json!(eps_proximal_check(pd, g.matrix(), eps, &field, grid));
        }
    }
    Ok(out.to_string())
}

pub fn bending_json(family: &str, t: f64, radius: usize) -> Result<String, cartanlab::Error> {
    if radius > MAX_RADIUS {
        return Err(cartanlab::Error::InvalidInput(format!("radius is capped at {MAX_RADIUS} in the browser")));
    }
    let fam = match family {
        "amalgam" => catalog::bending_amalgam()?,
        "hnn" => catalog::bending_hnn()?,
        other => return Err(cartanlab::Error::InvalidInput(format!("unknown family `{other}`"))),
    };
    let pres = &fam.presentation;
    let incl = pres.inclusion();
    let phi = bend(&fam, t)?;
    let witness = zariski_density_witness(&fam.y, t, &fam.space)?;
    let relators = check_relators(pres, &phi)?;
    let ball = word_ball(pres, &incl, radius)?;
    let rep = stability_scan_ball(pres, &ball, &incl, &phi, None)?;
    Ok(json!({
        "family": family,
        "t": t,
        "radius": radius,
        "ball_size": ball.len(),
        "relators_pass": relators.pass,
        "max_relator_deviation": relators.max_deviation,
        "witness": witness,
        "eps_hat": rep.eps_hat,
        "c_hat": rep.c_hat,
        "rho0": rep.rho0,
        "rows": rep.rows.iter().map(|r| [r.mu_norm, r.deviation]).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Cartan projection of an `SL_n` matrix over `field` (`real`, `complex`, `padic:P`).
#[wasm_bindgen]
pub fn cartan(field: &str, text: &str) -> Result<String, JsError> {
    cartan_json(field, text).map_err(err)
}

/// Proximality verdict; `eps > 0` adds the ε-proximality test.
#[wasm_bindgen]
pub fn proximal(field: &str, text: &str, eps: f64, seed: u32) -> Result<String, JsError> {
    proximal_json(field, text, eps, seed.into()).map_err(err)
}

/// Bends a shipped family at `t`: density witness, relators and the stability fit.
#[wasm_bindgen]
pub fn bending(family: &str, t: f64, radius: usize) -> Result<String, JsError> {
    bending_json(family, t, radius).map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unipotent_projection() {
        let v: serde_json::Value = serde_json::from_str(&cartan_json("real", "1 1; 0 1").unwrap()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((v["mu"][0].as_f64().unwrap() - phi.ln()).abs() < 1e-12);
    }

    #[test]
    fn padic_projection_is_integral() {
        let v: serde_json::Value = serde_json::from_str(&cartan_json("padic:3", "3 0\n0 1/3").unwrap()).unwrap();
        assert_eq!(v["lattice"], json!([1, -1]));
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(cartan_json("real", "1 2 3; 4 5").is_err());
    }

    #[test]
    fn diagonal_is_proximal() {
        let v: serde_json::Value = serde_json::from_str(&proximal_json("real", "100 0; 0 0.01", 0.1, 0).unwrap()).unwrap();
        assert_eq!(v["verdict"], "proximal");
        assert_eq!(v["eps"]["holds"], true);
    }

    #[test]
    fn unbent_family_is_flat() {
        let v: serde_json::Value = serde_json::from_str(&bending_json("amalgam", 0.0, 2).unwrap()).unwrap();
        assert_eq!(v["eps_hat"], 0.0);
        assert_eq!(v["witness"]["dense"], false);
        assert_eq!(v["relators_pass"], true);
    }
}
