//! Input files for the shipped examples, built from the library catalog.

use std::fs;
use std::io::Write;
use std::path::Path;

use cartanlab::bending::BendingFamily;
use cartanlab::catalog;
use cartanlab::cartan::GroupElement;
use cartanlab::wordgroups::{Presentation, Structure, Word};
use indexmap::IndexMap;

use crate::input::{matrix_text, spec_from_group, BendingSpec, ConeSpec, InputFile, StructureSpec, YSpec};
use crate::CliError;

fn elements_file(description: &str, ids: &[&str], els: &[GroupElement]) -> InputFile {
    let g = els[0].group();
    InputFile {
        description: Some(description.into()),
        field: Some(g.field().kind()),
        group: Some(spec_from_group(g)),
        ids: Some(ids.iter().map(|s| s.to_string()).collect()),
        matrices: Some(els.iter().map(|e| matrix_text(e.matrix())).collect()),
        ..InputFile::default()
    }
}

fn presentation_file(description: &str, p: &Presentation) -> InputFile {
    let sym = p.symbols();
    let names = |v: &[usize]| v.iter().map(|&i| sym[i].clone()).collect::<Vec<_>>();
    let pairs = |v: &[(Word, Word)]| v.iter().map(|(a, b)| (p.format_word(a), p.format_word(b))).collect::<Vec<_>>();
    let structure = match p.structure() {
        Structure::Free => StructureSpec::Free,
        Structure::Amalgam { side1, side2, common } => {
            StructureSpec::Amalgam { side1: names(side1), side2: names(side2), common: pairs(common) }
        }
        Structure::Hnn { base, stable, pairings } => {
            StructureSpec::Hnn { base: names(base), stable: sym[*stable].clone(), pairings: pairs(pairings) }
        }
    };
    let generators: IndexMap<_, _> =
        sym.iter().cloned().zip(p.generators().iter().map(|g| matrix_text(g.matrix()))).collect();
    InputFile {
        description: Some(description.into()),
        field: Some(p.group().field().kind()),
        group: Some(spec_from_group(p.group())),
        generators: Some(generators),
        structure: Some(structure),
        relators: if p.relators().is_empty() { None } else { Some(p.relators().iter().map(|w| p.format_word(w)).collect()) },
        ..InputFile::default()
    }
}

fn bending_file(description: &str, fam: &BendingFamily) -> InputFile {
    let mut f = presentation_file(description, &fam.presentation);
    f.bending = Some(BendingSpec {
        y: YSpec::Mode("boost".into()),
        t: Some(vec![0.0, 0.01, 0.1, 0.3]),
        density_assumption: Some("side groups Zariski-dense in SO(m,1); assumed, not verified".into()),
    });
    f
}

pub fn build(name: &str) -> Result<InputFile, CliError> {
    Ok(match name {
        "unipotent" => elements_file("[[1,1],[0,1]] over R", &["unipotent"], &[catalog::unipotent()?]),
        "padic-diag" => elements_file("diag(3, 1/3) over Q_3", &["diag3"], &[catalog::padic_diag()?]),
        "schottky-sl2" => {
            let mut f = presentation_file("rank-two Schottky group in SL2(Q)", &catalog::schottky_sl2()?);
            f.step = Some(catalog::schottky_sl2_step());
            f
        }
        "cyclic-diag" => {
            let mut f = presentation_file("cyclic group of diag(e^2, e^-2)", &catalog::cyclic_diag()?);
            f.step = Some(8.0);
            f.words = Some(vec!["a^6".into()]);
            f
        }
        "bending-amalgam" => bending_file("amalgam in SO(2,2) over Q(sqrt 2), bent along a boost", &catalog::bending_amalgam()?),
        "bending-hnn" => bending_file("HNN extension in SO(2,2) over Q(sqrt 2), bent along a boost", &catalog::bending_hnn()?),
        "properness-so21" | "properness-control" => {
            let (desc, p) = if name == "properness-so21" {
                ("SO(2,1) Schottky pair in SO(2,2) against the U(1,1) cone", catalog::properness_so21()?)
            } else {
                ("Schottky pair inside U(1,1) against its own cone", catalog::properness_control()?)
            };
            let mut f = presentation_file(desc, &p);
            f.cone = Some(ConeSpec::Samples(catalog::u11_axis_samples()?.iter().map(|g| matrix_text(g.matrix())).collect()));
            f
        }
        other => {
            return Err(CliError::Input(format!("unknown example `{other}`; known: {}", catalog::NAMES.join(", "))));
        }
    })
}

pub fn write(name: &str, out: Option<&Path>) -> Result<(), CliError> {
    if name == "list" {
        println!("{}", catalog::NAMES.join("\n"));
        return Ok(());
    }
    let f = build(name)?;
    let text = serde_json::to_string_pretty(&f).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}
