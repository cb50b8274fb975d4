use std::fs;
use std::path::Path;

use cartanlab::bending::{bend, module_decomposition_check_in, zariski_density_witness};
use cartanlab::cartan::{cartan, CartanVector, GroupElement};
use cartanlab::fields::abs_value;
use cartanlab::linalg::Matrix;
use cartanlab::projective::{eps_proximal_check, proximal_analyze, ProximalVerdict, SampleGrid};
use cartanlab::stability::{properness_scan, stability_scan_ball};
use cartanlab::transverse::{DecomposeOptions, Decomposer, RankOneModel};
use cartanlab::wordgroups::{check_relators, word_ball, Homomorphism, Word};
use serde_json::json;

use crate::input::{self, Context, InputFile};
use crate::output::{emit, flag, num, Table};
use crate::{examples, Cli, CliError, Command};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::Example { name } = &cli.command {
        return examples::write(name, cli.output.as_deref());
    }
    let path = cli.input.as_ref().ok_or_else(|| CliError::Input("--input is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file = InputFile::parse(&text, &path.display().to_string())?;
    let group = cli.group.as_deref().map(input::parse_group_flag).transpose()?;
    let ctx = input::context(&file, cli.field, group)?;
    for &t in &cli.t {
        if !t.is_finite() {
            return Err(CliError::Input("t values must be finite".into()));
        }
    }
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Cartan => cmd_cartan(&file, &ctx, out),
        Command::Ball => cmd_ball(&file, &ctx, cli, out),
        Command::Proximal => cmd_proximal(&file, &ctx, cli, out),
        Command::Decompose => cmd_decompose(&file, &ctx, cli, out),
        Command::Bend => cmd_bend(&file, &ctx, cli, out),
        Command::Stability => cmd_stability(&file, &ctx, cli, out),
        Command::Properness => cmd_properness(&file, &ctx, cli, out),
        Command::Example { .. } => unreachable!(),
    }
}

fn mu_cells(mu: &CartanVector) -> Vec<String> {
    match &mu.lattice {
        Some(l) => l.iter().map(|x| x.to_string()).collect(),
        None => mu.coords.iter().map(|&x| num(x)).collect(),
    }
}

fn mu_header(prefix: &[&str], dim: usize, suffix: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    h.extend((1..=dim).map(|i| format!("mu_{i}")));
    h.extend(suffix.iter().map(|s| s.to_string()));
    h
}

fn cmd_cartan(file: &InputFile, ctx: &Context, out: Option<&Path>) -> Result<(), CliError> {
    let (ids, ms) = input::elements(file, ctx)?;
    let mut table = Table::new(mu_header(&["id"], ctx.group.cartan_dim(), &["norm"]));
    for (id, m) in ids.iter().zip(ms) {
        let g = GroupElement::new(m, ctx.group.clone()).map_err(|e| CliError::Core(e).context(&format!("matrix `{id}`")))?;
        let mu = cartan(&g)?;
        let mut row = vec![id.clone()];
        row.extend(mu_cells(&mu));
        row.push(num(mu.norm()));
        table.push(row);
    }
    emit(&table, &json!({"command": "cartan", "field": ctx.field.to_string(), "count": ids.len()}), out)
}

fn cmd_ball(file: &InputFile, ctx: &Context, cli: &Cli, out: Option<&Path>) -> Result<(), CliError> {
    let pres = input::presentation(file, ctx)?;
    let ball = word_ball(&pres, &pres.inclusion(), cli.radius)?;
    let g = pres.group();
    let mut table = Table::new(mu_header(&["index", "word", "length", "parent"], g.cartan_dim(), &["mu_norm"]));
    for (i, e) in ball.entries.iter().enumerate() {
        let mu = cartan(&GroupElement::new_unchecked(e.matrix.clone(), g.clone()))?;
        let mut row = vec![
            i.to_string(),
            pres.format_word(&e.word),
            e.word.len().to_string(),
            e.parent.map(|p| p.to_string()).unwrap_or_default(),
        ];
        row.extend(mu_cells(&mu));
        row.push(num(mu.norm()));
        table.push(row);
    }
    let summary = json!({
        "command": "ball",
        "radius": ball.radius,
        "size": ball.len(),
        "sphere_sizes": ball.sphere_sizes,
        "exact": ball.exact,
        "truncated": ball.truncated,
        "merges": ball.merges,
        "hash_collisions": ball.hash_collisions,
    });
    emit(&table, &summary, out)
}

fn cmd_proximal(file: &InputFile, ctx: &Context, cli: &Cli, out: Option<&Path>) -> Result<(), CliError> {
    let (ids, ms) = input::elements(file, ctx)?;
    let grid = SampleGrid { seed: cli.seed, ..SampleGrid::default() };
    let mut table = Table::new([
        "id", "verdict", "abs_lambda", "gap_ratio", "lambda_exact", "eps", "eps_proximal", "separation", "certified",
        "worst_sample",
    ]);
    let mut counts = [0usize; 3];
    for (id, m) in ids.iter().zip(&ms) {
        let v = proximal_analyze(m, &ctx.field)?;
        let mut row = vec![id.clone(), v.label().to_string()];
        match &v {
            ProximalVerdict::Proximal(pd) => {
                counts[0] += 1;
                row.push(num(abs_value(&pd.lambda, &ctx.field)?));
                row.push(num(pd.gap_ratio));
                row.push(flag(pd.exact));
            }
            ProximalVerdict::NotProximal => {
                counts[1] += 1;
                row.extend([String::new(), String::new(), String::new()]);
            }
            ProximalVerdict::Indeterminate { relative_gap } => {
                counts[2] += 1;
                row.extend([String::new(), num(1.0 - relative_gap), String::new()]);
            }
        }
        match (cli.eps, v.data()) {
            (Some(eps), Some(pd)) => {
                let e = eps_proximal_check(pd, m, eps, &ctx.field, grid);
                row.extend([num(eps), flag(e.holds), num(e.separation), flag(e.certified), num(e.worst_sample)]);
            }
            (Some(eps), None) => row.extend([num(eps), flag(false), String::new(), String::new(), String::new()]),
            (None, _) => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        table.push(row);
    }
    let summary = json!({
        "command": "proximal",
        "field": ctx.field.to_string(),
        "proximal": counts[0],
        "not_proximal": counts[1],
        "indeterminate": counts[2],
        "eps": cli.eps,
        "grid": grid,
    });
    emit(&table, &summary, out)
}

fn cmd_decompose(file: &InputFile, ctx: &Context, cli: &Cli, out: Option<&Path>) -> Result<(), CliError> {
    let pres = input::presentation(file, ctx)?;
    let step = cli
        .step
        .or(file.step)
        .ok_or_else(|| CliError::Input("decompose needs a cut length (--step or input `step`)".into()))?;
    let model = RankOneModel::for_group(pres.group())?;
    let (words, orbit_radius): (Vec<Word>, usize) = match &file.words {
        Some(ws) => {
            let ws = ws.iter().map(|w| pres.parse_word(w)).collect::<Result<Vec<_>, _>>()?;
            let r = ws.iter().map(Word::len).max().unwrap_or(0).max(cli.radius);
            (ws, r)
        }
        None => {
            let ball = word_ball(&pres, &pres.inclusion(), cli.radius)?;
            (ball.entries.into_iter().map(|e| e.word).collect(), cli.radius)
        }
    };
    let dec = Decomposer::new(&pres, model.clone(), orbit_radius, &DecomposeOptions::default())?;
    let mut table = Table::new([
        "word", "pieces", "factors", "total_displacement", "d_achieved", "ceiling", "min_gap", "max_snap", "reassembles",
        "within_ceiling",
    ]);
    let mut worst: f64 = 0.0;
    let mut all_within = true;
    for w in &words {
        let d = dec.decompose(w, step)?;
        let min_gap = d.gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let max_snap = d.snap_distances.iter().copied().fold(0.0, f64::max);
        let within = d.d_achieved <= d.ceiling + 1e-9;
        all_within &= within;
        worst = worst.max(d.d_achieved);
        table.push(vec![
            d.word.clone(),
            d.factors.len().to_string(),
            d.factors.join(" | "),
            num(d.total_displacement),
            num(d.d_achieved),
            num(d.ceiling),
            if d.gaps.is_empty() { String::new() } else { num(min_gap) },
            num(max_snap),
            flag(d.reassembles),
            flag(within),
        ]);
    }
    let summary = json!({
        "command": "decompose",
        "model": model.name(),
        "step": step,
        "orbit_radius": orbit_radius,
        "words": words.len(),
        "max_d_achieved": worst + 0.0,
        "all_within_ceiling": all_within,
    });
    emit(&table, &summary, out)
}

fn t_list(cli: &Cli, file: &InputFile) -> Vec<f64> {
    if !cli.t.is_empty() {
        return cli.t.clone();
    }
    file.bending.as_ref().and_then(|b| b.t.clone()).unwrap_or_else(|| vec![0.0])
}

/// Real parts of the entries, row-major and space-separated.
fn row_major(m: &Matrix) -> String {
    m.rows().iter().flatten().map(|s| num(s.to_complex().re)).collect::<Vec<_>>().join(" ")
}

fn cmd_bend(file: &InputFile, ctx: &Context, cli: &Cli, out: Option<&Path>) -> Result<(), CliError> {
    let pres = input::presentation(file, ctx)?;
    let fam = input::bending_family(file, pres, ctx)?
        .ok_or_else(|| CliError::Input("input has no `bending` block".into()))?;
    let ts = t_list(cli, file);
    let mut table = Table::new([
        "t", "generator", "entries", "relators_pass", "max_relator_deviation", "escapes", "closure_dim", "target_dim",
        "dense",
    ]);
    let mut sweep = Vec::new();
    for &t in &ts {
        let phi = bend(&fam, t)?;
        let rel = check_relators(&fam.presentation, &phi)?;
        let w = zariski_density_witness(&fam.y, t, &fam.space)?;
        for (s, m) in fam.presentation.symbols().iter().zip(phi.images()) {
            table.push(vec![
                num(t),
                s.clone(),
                row_major(m),
                flag(rel.pass),
                num(rel.max_deviation),
                flag(w.escapes),
                w.closure_dim.to_string(),
                w.target_dim.to_string(),
                flag(w.dense),
            ]);
        }
        sweep.push(json!({"t": t, "relators": rel, "density": w}));
    }
    let module = module_decomposition_check_in(&fam.space)?;
    let summary = json!({
        "command": "bend",
        "rule": format!("{:?}", fam.rule).to_lowercase(),
        "y": input::matrix_text(&Matrix::Quadratic(fam.y.clone())),
        "module": module,
        "density_assumption": file.bending.as_ref().and_then(|b| b.density_assumption.clone()),
        "sweep": sweep,
    });
    emit(&table, &summary, out)
}

fn cmd_stability(file: &InputFile, ctx: &Context, cli: &Cli, out: Option<&Path>) -> Result<(), CliError> {
    let pres = input::presentation(file, ctx)?;
    let incl = pres.inclusion();
    let ball = word_ball(&pres, &incl, cli.radius)?;
    let mut deformations: Vec<(Option<f64>, Homomorphism)> = Vec::new();
    let mut source = "identity";
    if file.bending.is_some() {
        source = "bending";
        let fam = input::bending_family(file, pres.clone(), ctx)?.expect("bending block");
        for t in t_list(cli, file) {
            deformations.push((Some(t), bend(&fam, t)?));
        }
    } else if let Some(images) = input::deformed_images(file, &pres, ctx)? {
        source = "deformed";
        deformations.push((None, Homomorphism::new(pres.group().clone(), images)?));
    } else if let Some(c) = &file.conjugator {
        source = "conjugation";
        let c = input::matrix(c, &ctx.field)?;
        deformations.push((None, incl.conjugate(&c)?));
    } else {
        deformations.push((None, incl.clone()));
    }
    let sweep = deformations.iter().any(|(t, _)| t.is_some());
    let mut header = if sweep { vec!["t"] } else { vec![] };
    header.extend(["word", "length", "mu_norm", "deviation"]);
    let mut table = Table::new(header);
    let mut fits = Vec::new();
    for (t, phi) in &deformations {
        let rep = stability_scan_ball(&pres, &ball, &incl, phi, cli.rho0)?;
        for r in &rep.rows {
            let mut row = t.map(|t| vec![num(t)]).unwrap_or_default();
            row.extend([r.word.clone(), r.length.to_string(), num(r.mu_norm), num(r.deviation)]);
            table.push(row);
        }
        fits.push(json!({
            "t": t,
            "eps_hat": rep.eps_hat,
            "c_hat": rep.c_hat,
            "envelope_valid": rep.envelope_valid(1e-12),
        }));
    }
    let rho0 = match cli.rho0 {
        Some(r) => r,
        None => cartanlab::stability::default_rho0(&pres, &incl)?,
    };
    let summary = json!({
        "command": "stability",
        "deformation": source,
        "radius": cli.radius,
        "ball_size": ball.len(),
        "rho0": rho0,
        "policy": cartanlab::stability::ENVELOPE_POLICY,
        "fits": fits,
    });
    emit(&table, &summary, out)
}

fn cmd_properness(file: &InputFile, ctx: &Context, cli: &Cli, out: Option<&Path>) -> Result<(), CliError> {
    let pres = input::presentation(file, ctx)?;
    let cone = input::cone(file, ctx)?;
    let rep = properness_scan(&pres, cli.radius, &cone, cli.rho0)?;
    let mut table = Table::new(["word", "mu_norm", "margin"]);
    for r in &rep.rows {
        table.push(vec![r.word.clone(), num(r.mu_norm), num(r.margin)]);
    }
    let summary = json!({
        "command": "properness",
        "radius": rep.radius,
        "cone": rep.cone,
        "rho0": rep.rho0,
        "policy": rep.policy,
        "slope": rep.slope,
        "raw_slope": rep.raw_slope,
        "intercept": rep.intercept,
        "positive": rep.positive(),
        "certificate": rep.certificate,
    });
    emit(&table, &summary, out)
}
