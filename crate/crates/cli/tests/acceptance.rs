//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cartanlab::bending::{
    bend, boost_y, module_decomposition_check, so_m1_in_m2, zariski_density_witness, QuadFormSpace, DEFAULT_RADICAND,
};
use cartanlab::cartan::{
    cartan, lattice_diff, norm_le_sum_exact, wedge_norm_exponent, wedge_norm_log, weight_pairing, weight_pairing_exact,
    GroupDesc, GroupElement,
};
use cartanlab::catalog;
use cartanlab::fields::FieldDesc;
use cartanlab::linalg::{int, Matrix, QMat};
use cartanlab::projective::{product_sandwich_check, SampleGrid};
use cartanlab::samples::{random_sl_padic, random_sl_real_element, random_so_cayley, sandwich_instance_padic, sandwich_instance_real};
use cartanlab::stability::{cone_gap_sup, mu_cone, properness_scan, stability_scan_ball, Subspace};
use cartanlab::transverse::{decompose, DecomposeOptions, Decomposer, RankOneModel};
use cartanlab::wordgroups::{check_relators, word_ball};
use cartanlab::Error;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn sq(v: &[i64]) -> i64 {
    v.iter().map(|x| x * x).sum()
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    ensure(took <= limit, || format!("{out}; took {took:.1?}, limit {limit:?}"))?;
    Ok(format!("{out}; {took:.1?}"))
}

fn c1() -> Outcome {
    timed(Duration::from_secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for i in 0..10_000 {
            let g = random_sl_real_element(3, &mut rng);
            let h = random_sl_real_element(3, &mut rng);
            let (mg, mh) = (cartan(&g).map_err(e2s)?, cartan(&h).map_err(e2s)?);
            let mgh = cartan(&g.mul(&h).map_err(e2s)?).map_err(e2s)?;
            let tol = 1e-9 * (1.0 + mg.norm() + mh.norm());
            ensure(mgh.norm() <= mg.norm() + mh.norm() + tol, || format!("real pair {i}: triangle"))?;
            ensure(mgh.dist(&mh) <= mg.norm() + tol && mgh.dist(&mg) <= mh.norm() + tol, || {
                format!("real pair {i}: difference bound")
            })?;
        }
        let grp = GroupDesc::sl(2, FieldDesc::padic(3).map_err(e2s)?).map_err(e2s)?;
        for i in 0..1000 {
            let g = GroupElement::new(Matrix::Rational(random_sl_padic(2, 3, 6, &mut rng)), grp.clone()).map_err(e2s)?;
            let h = GroupElement::new(Matrix::Rational(random_sl_padic(2, 3, 6, &mut rng)), grp.clone()).map_err(e2s)?;
            let (mg, mh) = (cartan(&g).map_err(e2s)?, cartan(&h).map_err(e2s)?);
            let mgh = cartan(&g.mul(&h).map_err(e2s)?).map_err(e2s)?;
            let (g2, h2) = (mg.norm_sq_exact().ok_or("no lattice")?, mh.norm_sq_exact().ok_or("no lattice")?);
            ensure(norm_le_sum_exact(mgh.norm_sq_exact().ok_or("no lattice")?, g2, h2), || format!("Q3 pair {i}: triangle"))?;
            ensure(
                sq(&lattice_diff(&mgh, &mh).ok_or("no lattice")?) <= g2 && sq(&lattice_diff(&mgh, &mg).ok_or("no lattice")?) <= h2,
                || format!("Q3 pair {i}: difference bound"),
            )?;
        }
        Ok("10000 SL3(R) pairs, 1000 SL2(Q3) pairs".into())
    })
}

fn c2() -> Outcome {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mu = cartan(&catalog::unipotent().map_err(e2s)?).map_err(e2s)?;
    let err = (mu.coords[0] - phi.ln()).abs().max((mu.coords[1] + phi.ln()).abs());
    ensure(err <= 1e-12, || format!("unipotent off by {err:e}"))?;
    let mu = cartan(&catalog::padic_diag().map_err(e2s)?).map_err(e2s)?;
    ensure(mu.lattice == Some(vec![1, -1]), || format!("diag(3,1/3) gave {:?}", mu.lattice))?;
    Ok(format!("unipotent error {err:.1e}; diag(3,1/3) -> (1,-1)"))
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst: f64 = 0.0;
    for i0 in 1..=2 {
        for _ in 0..1000 {
            let g = random_sl_real_element(3, &mut rng);
            let mu = cartan(&g).map_err(e2s)?;
            worst = worst.max((wedge_norm_log(&g, i0).map_err(e2s)? - weight_pairing(i0, &mu).map_err(e2s)?).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("real wedge error {worst:e}"))?;
    let grp = GroupDesc::sl(3, FieldDesc::padic(3).map_err(e2s)?).map_err(e2s)?;
    for k in 0..100 {
        let g = GroupElement::new(Matrix::Rational(random_sl_padic(3, 3, 10, &mut rng)), grp.clone()).map_err(e2s)?;
        let mu = cartan(&g).map_err(e2s)?;
        for i0 in 1..=2 {
            let (a, b) = (wedge_norm_exponent(&g, i0).map_err(e2s)?, weight_pairing_exact(i0, &mu).map_err(e2s)?);
            ensure(a == b, || format!("SL3(Q3) element {k}, i0 = {i0}: {a} vs {b}"))?;
        }
    }
    Ok(format!("2000 real checks, max error {worst:.1e}; 200 exact SL3(Q3) checks"))
}

fn c4() -> Outcome {
    let grid = SampleGrid { points: 2000, seed: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut count = 0;
    for i in 0..150 {
        let dim = rng.gen_range(3..=6);
        let n = rng.gen_range(1..=8);
        let inst = sandwich_instance_real(dim, n, 0.1, &mut rng);
        let rep = product_sandwich_check(&inst.z, &inst.k, inst.eps, &inst.field, grid).map_err(e2s)?;
        ensure(rep.pass, || format!("real instance {i} (dim {dim}, n {n}): {rep:?}"))?;
        count += 1;
    }
    for p in [2u64, 3, 5] {
        for i in 0..20 {
            let dim = rng.gen_range(3..=6);
            let n = rng.gen_range(1..=8);
            let inst = sandwich_instance_padic(p, dim, n, &mut rng);
            let rep = product_sandwich_check(&inst.z, &inst.k, inst.eps, &inst.field, grid).map_err(e2s)?;
            ensure(rep.pass, || format!("Q{p} instance {i} (dim {dim}, n {n}): {rep:?}"))?;
            count += 1;
        }
    }
    let real = FieldDesc::real();
    let m3 = |v: [f64; 9]| Matrix::Real(DMatrix::from_row_slice(3, 3, &v));
    let z = m3([8.0, 0.0, 0.0, 0.0, 0.05, 0.0, 0.0, 0.0, 0.05]);
    let k = m3([0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let mut guards = vec![("isometry into hyperplane", product_sandwich_check(&[z.clone(), z], &[k], 0.1, &real, grid))];
    let z = m3([8.0, 0.0, 0.0, 0.0, 8.0, 0.0, 0.0, 0.0, 0.1]);
    guards.push(("non-proximal factor", product_sandwich_check(&[z], &[], 0.1, &real, grid)));
    let inst = sandwich_instance_padic(3, 3, 2, &mut rng);
    let k = Matrix::Rational(QMat::diag(vec![int(1), int(3), int(1)]));
    guards.push(("non-unimodular k", product_sandwich_check(&inst.z, &[k], inst.eps, &inst.field, grid)));
    for (name, r) in guards {
        ensure(matches!(r, Err(Error::Precondition(_))), || format!("guard `{name}` not rejected"))?;
    }
    Ok(format!("{count} instances, 0 violations; 3 guards rejected"))
}

fn c5() -> Outcome {
    let p = catalog::cyclic_diag().map_err(e2s)?;
    let w = p.parse_word("a^6").map_err(e2s)?;
    let d = decompose(&w, &p, &RankOneModel::Sl2, 8.0, &DecomposeOptions::default()).map_err(e2s)?;
    ensure(d.d_achieved == 0.0 && d.factors.windows(2).all(|f| f[0] == f[1]) && d.reassembles, || {
        format!("cyclic a^6: {d:?}")
    })?;
    let cyc = format!("cyclic a^6 -> {} equal factors", d.factors.len());
    let p = catalog::schottky_sl2().map_err(e2s)?;
    let step = catalog::schottky_sl2_step();
    let dec = Decomposer::new(&p, RankOneModel::Sl2, 6, &DecomposeOptions::default()).map_err(e2s)?;
    let ball = word_ball(&p, &p.inclusion(), 6).map_err(e2s)?;
    let (mut worst, mut ceiling) = (0.0f64, 0.0f64);
    for e in &ball.entries {
        let d = dec.decompose(&e.word, step).map_err(e2s)?;
        ensure(d.reassembles, || format!("{} does not reassemble", d.word))?;
        ensure(d.gaps.iter().all(|&g| g >= -d.d_achieved - 1e-12), || format!("{}: gap below -D", d.word))?;
        ensure(d.d_achieved <= d.ceiling + 1e-9, || format!("{}: D {} above ceiling {}", d.word, d.d_achieved, d.ceiling))?;
        if d.d_achieved > worst {
            (worst, ceiling) = (d.d_achieved, d.ceiling);
        }
    }
    Ok(format!("{cyc}; Schottky ball 6 ({} elements) max D {worst:.4} against its ceiling {ceiling:.4}", ball.len()))
}

fn c6() -> Outcome {
    timed(Duration::from_secs(120), || {
        let fam = catalog::bending_amalgam().map_err(e2s)?;
        let pres = &fam.presentation;
        let incl = pres.inclusion();
        let ball = word_ball(pres, &incl, 5).map_err(e2s)?;
        let mut eps = Vec::new();
        for t in [0.0, 0.01, 0.1, 0.3] {
            let phi = bend(&fam, t).map_err(e2s)?;
            let rep = stability_scan_ball(pres, &ball, &incl, &phi, None).map_err(e2s)?;
            if t == 0.0 {
                ensure(rep.eps_hat == 0.0 && rep.c_hat == 0.0, || format!("t = 0: ({}, {})", rep.eps_hat, rep.c_hat))?;
            }
            eps.push(rep.eps_hat);
        }
        let trend = eps.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" < ");
        ensure(eps.windows(2).all(|w| w[1] > w[0]), || format!("eps_hat not strictly increasing: {eps:?}"))?;

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (mut worst_eps, mut c_ok, mut dev_ok) = (0.0f64, true, true);
        for _ in 0..20 {
            let g = Matrix::Quadratic(random_so_cayley(fam.space.coeffs(), 2, &mut rng));
            let mu_g = cartan(&GroupElement::new(g.clone(), fam.group().clone()).map_err(e2s)?).map_err(e2s)?.norm();
            let phi = incl.conjugate(&g).map_err(e2s)?.to_floating().map_err(e2s)?;
            let rep = stability_scan_ball(pres, &ball, &incl, &phi, None).map_err(e2s)?;
            worst_eps = worst_eps.max(rep.eps_hat);
            c_ok &= rep.c_hat <= 2.0 * mu_g + 1e-9;
            dev_ok &= rep.rows.iter().all(|r| r.deviation <= 2.0 * mu_g + 1e-9);
        }
        let conj = format!(
            "20 conjugations: max eps_hat {worst_eps:.3e}, c_hat <= 2|mu(g)| {c_ok}, every deviation <= 2|mu(g)| {dev_ok}"
        );
        ensure(worst_eps <= 1e-9 && c_ok, || format!("trend {trend}; {conj} (cutoff-split fit, see notes)"))?;
        Ok(format!("trend {trend}; {conj}"))
    })
}

fn c7() -> Outcome {
    let cone = mu_cone(&catalog::u11_axis_samples().map_err(e2s)?).map_err(e2s)?;
    let so21 = properness_scan(&catalog::properness_so21().map_err(e2s)?, 5, &cone, None).map_err(e2s)?;
    let ctrl = properness_scan(&catalog::properness_control().map_err(e2s)?, 5, &cone, None).map_err(e2s)?;
    let msg = format!("so21 slope {:?}; control raw slope {:.1e}", so21.slope, ctrl.raw_slope);
    ensure(so21.positive() && !ctrl.positive() && ctrl.raw_slope.abs() <= 1e-9, || msg.clone())?;
    Ok(msg)
}

fn c8() -> Outcome {
    for m in 2..=4 {
        let v = module_decomposition_check(m).map_err(e2s)?;
        ensure(v.pass && v.dim_w == m + 1, || format!("module check m = {m}: {v:?}"))?;
    }
    let ts = [1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0];
    for m in 2..=3 {
        let space = QuadFormSpace::so_m2(m, DEFAULT_RADICAND).map_err(e2s)?;
        let y = boost_y(&space);
        ensure(!zariski_density_witness(&y, 0.0, &space).map_err(e2s)?.dense, || format!("m = {m}: dense at t = 0"))?;
        for h in &so_m1_in_m2(&space).map_err(e2s)?.basis {
            ensure(!zariski_density_witness(h, 0.5, &space).map_err(e2s)?.dense, || format!("m = {m}: so(m,1) direction dense"))?;
        }
        for t in ts {
            ensure(zariski_density_witness(&y, t, &space).map_err(e2s)?.dense, || format!("m = {m}: not dense at t = {t}"))?;
        }
    }
    let mut checked = 0;
    for fam in [catalog::bending_amalgam().map_err(e2s)?, catalog::bending_hnn().map_err(e2s)?] {
        for t in [0.0, 1e-3, 0.01, 0.1, 0.3, 1.0] {
            let rep = check_relators(&fam.presentation, &bend(&fam, t).map_err(e2s)?).map_err(e2s)?;
            ensure(rep.pass, || format!("relators fail at t = {t}: {:.3e}", rep.max_deviation))?;
            checked += 1;
        }
    }
    Ok(format!("module m = 2..4; density at {} values of t; {checked} bent families satisfy relators", ts.len()))
}

fn c9() -> Outcome {
    let e1 = Subspace::span(3, &[vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0]]).map_err(e2s)?;
    let sups = [0.3, 0.1, 0.03].iter().map(|&d| cone_gap_sup(&e1, d, 1.0, 400, 9)).collect::<Result<Vec<_>, _>>().map_err(e2s)?;
    let msg = sups.iter().map(|s| format!("{s:.4e}")).collect::<Vec<_>>().join(" > ");
    ensure(sups.windows(2).all(|w| w[1] < w[0]), || format!("not decreasing: {msg}"))?;
    Ok(format!("sup over delta 0.3, 0.1, 0.03: {msg}"))
}

fn run_cli(args: &[&str], out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_cartanlab"))
        .args(args)
        .arg("--output")
        .arg(out)
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("{args:?} exited with {status}"))?;
    std::fs::read(out).map_err(|e| e.to_string())
}

fn c10() -> Outcome {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [(&str, &str, &[&str]); 3] = [
        ("decompose", "schottky-sl2.json", &["--radius", "4"]),
        ("stability", "bending-amalgam.json", &["--radius", "3"]),
        ("proximal", "unipotent.json", &["--eps", "0.1", "--seed", "5"]),
    ];
    for (cmd, file, extra) in runs {
        let input = data.join(file);
        let mut args = vec![cmd, "--input", input.to_str().ok_or("non-UTF-8 path")?];
        args.extend_from_slice(extra);
        let a = run_cli(&args, &dir.path().join(format!("{cmd}-a.csv")))?;
        let b = run_cli(&args, &dir.path().join(format!("{cmd}-b.csv")))?;
        ensure(a == b, || format!("{cmd} on {file}: outputs differ"))?;
    }
    Ok("decompose, stability and proximal CSVs byte-identical across runs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Cartan inequalities", c1),
        ("closed forms", c2),
        ("wedge identity", c3),
        ("proximal sandwich", c4),
        ("transverse decomposition", c5),
        ("deformation stability", c6),
        ("properness margins", c7),
        ("bending witnesses", c8),
        ("cone gap", c9),
        ("determinism", c10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
