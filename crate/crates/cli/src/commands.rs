use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cmv_spectra::cmv::VerblunskyWord;
use cmv_spectra::construction::{
    build_tower_partial, plan_refinement, Modulus, RefineOptions, TowerMode, TowerSchedule,
};
use cmv_spectra::spectral::{bands_csv, dos_csv, DosRoute, Spectrum, EDGE_TOL, GRID_PER_Q};
use cmv_spectra::transfer::{discriminant, lyapunov, SpectralParameter};
use cmv_spectra::verify::{run_criterion, Status, CRITERIA};
use cmv_spectra::walk::{coins_to_cmv, rage_diagnostics, CoinSequence, Spin, WalkState};
use serde::Deserialize;
use serde_json::json;

use crate::output::{num, Failure, Run};
use crate::{Command, Global, SpinArg, VerifyArgs, WalkArgs};

const DOS_GRID: usize = 4096;
const LYAPUNOV_GRID: usize = 1024;
const SCHUR_GRID: usize = 512;

pub fn dispatch(global: &Global, command: &Command, run: &mut Run) -> Result<(), Failure> {
    match command {
        Command::Spectrum => spectrum(global, run),
        Command::Dos => dos(global, run),
        Command::Lyapunov => lyapunov_scan(global, run),
        Command::Schur => schur(global, run),
        Command::Thin => thin(global, run),
        Command::Tower => tower(global, run),
        Command::Walk(args) => walk(global, args, run),
        Command::Verify(args) => verify(args, run),
    }
}

fn config_path(global: &Global) -> Result<&Path, Failure> {
    global
        .config
        .as_deref()
        .ok_or_else(|| Failure::Config("this command needs --config PATH".into()))
}

/// Paths inside a config are relative to the config file.
fn resolve(config: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn load_word(run: &mut Run, path: &Path) -> Result<VerblunskyWord, Failure> {
    Ok(VerblunskyWord::from_json(&run.read_input(path)?)?)
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Config(format!("{what} config: {e}")))
}

/// The spectrum of the config word; `grid` overrides the band-scan grid.
fn spectrum_of(global: &Global, run: &mut Run, grid: Option<usize>) -> Result<Spectrum, Failure> {
    let word = load_word(run, config_path(global)?)?;
    let grid = grid.unwrap_or(GRID_PER_Q * word.q());
    Ok(Spectrum::new(&word, grid, global.tol.unwrap_or(EDGE_TOL))?)
}

fn spectrum(global: &Global, run: &mut Run) -> Result<(), Failure> {
    let s = spectrum_of(global, run, global.grid)?;
    let b = s.bands();
    run.write("bands.csv", &bands_csv(b))?;
    run.write_json(
        "spectrum.json",
        &json!({
            "q": s.q(),
            "measure": b.measure(),
            "log_measure": b.log_measure(),
            "log_rho_inf": s.log_rho_inf(),
            "bands": b.bands,
            "gaps": b.gaps,
            "touch_points": b.touch_points,
            "edge_residuals": b.edge_residuals,
        }),
    )
}

fn dos(global: &Global, run: &mut Run) -> Result<(), Failure> {
    let s = spectrum_of(global, run, None)?;
    let profile = s.dos_profile(global.grid.unwrap_or(DOS_GRID));
    run.write("dos.csv", &dos_csv(&profile))
}

fn lyapunov_scan(global: &Global, run: &mut Run) -> Result<(), Failure> {
    let word = load_word(run, config_path(global)?)?;
    let n = global.grid.unwrap_or(LYAPUNOV_GRID);
    let mut csv = String::from("tau,discriminant,lyapunov\n");
    for i in 0..n {
        let t = TAU * i as f64 / n as f64;
        let z = SpectralParameter::on_circle(t);
        let (d, l) = (discriminant(&word, z)?.re, lyapunov(&word, z)?);
        let _ = writeln!(csv, "{},{},{}", num(t), num(d), num(l));
    }
    run.write("lyapunov.csv", &csv)
}

fn schur(global: &Global, run: &mut Run) -> Result<(), Failure> {
    let s = spectrum_of(global, run, None)?;
    let n = global.grid.unwrap_or(SCHUR_GRID);
    let mut csv = String::from("tau,shift,s_re,s_im,s_abs,density,schur_bound,lower_bound\n");
    for i in 0..n {
        let t = TAU * (i as f64 + 0.5) / n as f64;
        // Points outside the bands or too close to an edge have no elliptic fixed point.
        let Ok(sample) = s.schur_values(t) else { continue };
        let density = s.dos_density(t, DosRoute::Itrace)?;
        let (sb, lb) = (s.schur_dos_bound(t)?, s.dos_lower_bound(t)?);
        for (l, v) in sample.values.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                num(t),
                2 * l,
                num(v.re),
                num(v.im),
                num(v.norm()),
                num(density),
                num(sb),
                num(lb)
            );
        }
    }
    run.write("schur.csv", &csv)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThinConfig {
    seed: PathBuf,
    delta: f64,
    /// Period multiplier; the smallest admissible one when omitted.
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    qcap: Option<usize>,
}

fn refine_options(global: &Global, qcap: Option<usize>) -> RefineOptions {
    let d = RefineOptions::default();
    RefineOptions {
        qcap: qcap.unwrap_or(d.qcap),
        eta_grid: global.grid.unwrap_or(d.eta_grid),
    }
}

fn thin(global: &Global, run: &mut Run) -> Result<(), Failure> {
    let path = config_path(global)?;
    let text = run.read_input(path)?;
    let cfg: ThinConfig = parse(&text, "thin")?;
    let seed = load_word(run, &resolve(path, &cfg.seed))?;
    let plan = plan_refinement(&seed, cfg.delta, refine_options(global, cfg.qcap))?;
    let cert = plan.finish(cfg.n.unwrap_or(plan.n_min))?;
    run.write("word.json", &(cert.word.to_json() + "\n"))?;
    run.write("bands.csv", &bands_csv(&cert.bands))?;
    run.write_json(
        "certificate.json",
        &json!({
            "delta": plan.delta,
            "n_min": plan.n_min,
            "eta_grid_min": plan.eta_grid_min,
            "certificate": cert,
        }),
    )?;
    if !cert.bound_holds {
        run.flag(Failure::Certification(format!(
            "measured log Leb {} exceeds the claimed bound {}",
            cert.log_leb, cert.log_claimed_bound
        )));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerConfig {
    seed: PathBuf,
    mode: TowerMode,
    eps0: f64,
    depth: usize,
    #[serde(default)]
    h: Option<Modulus>,
    #[serde(default)]
    qcap: Option<usize>,
}

fn tower(global: &Global, run: &mut Run) -> Result<(), Failure> {
    let path = config_path(global)?;
    let text = run.read_input(path)?;
    let cfg: TowerConfig = parse(&text, "tower")?;
    let seed = load_word(run, &resolve(path, &cfg.seed))?;
    let mut schedule = TowerSchedule::new(cfg.mode, seed, cfg.eps0);
    if cfg.h.is_some() {
        schedule.h = cfg.h;
    }
    let options = refine_options(global, cfg.qcap);
    schedule.qcap = options.qcap;
    schedule.eta_grid = options.eta_grid;
    let (tower, err) = build_tower_partial(&schedule, cfg.depth);
    for (k, w) in tower.words.iter().enumerate() {
        run.write(&format!("level_{}.json", k + 1), &(w.to_json() + "\n"))?;
    }
    run.write_json("tower.json", &tower)?;
    match err {
        // Completed levels are still written; the exit code records the stop.
        Some(e @ cmv_spectra::Error::InvalidArgument(_)) => Err(e.into()),
        Some(e) => {
            run.flag(e.into());
            Ok(())
        }
        None => Ok(()),
    }
}

fn walk(global: &Global, args: &WalkArgs, run: &mut Run) -> Result<(), Failure> {
    if args.horizon == 0 || args.j < 0 {
        return Err(Failure::Config("--horizon must be positive and --j nonnegative".into()));
    }
    let coins = CoinSequence::from_json(&run.read_input(config_path(global)?)?)?;
    let spin = match args.spin {
        SpinArg::Up => Spin::Up,
        SpinArg::Down => Spin::Down,
    };
    let report = rage_diagnostics(&coins, &WalkState::basis(args.start, spin), args.j, args.horizon);
    let n = args.horizon;
    let mut checkpoints: Vec<usize> = (0..usize::BITS).map(|k| 1usize << k).take_while(|&m| m <= n).collect();
    if checkpoints.last() != Some(&n) {
        checkpoints.push(n);
    }
    let mut csv = String::from("n,survival,cesaro,wiener\n");
    for &m in &checkpoints {
        let _ = writeln!(
            csv,
            "{m},{},{},{}",
            num(report.survival_at(m as i64)),
            num(report.cesaro[m]),
            num(report.wiener[m])
        );
    }
    run.write("walk.csv", &csv)?;
    run.write_json(
        "walk.json",
        &json!({
            "period": coins.period(),
            "horizon": n,
            "j": args.j,
            "cesaro_slope": report.cesaro_slope(32, n),
            "report": report,
        }),
    )?;
    // Walks with degenerate coins have no CMV word; that is not an error here.
    if let Ok(word) = coins_to_cmv(&coins) {
        run.write("walk_word.json", &(word.to_json() + "\n"))?;
    }
    Ok(())
}

fn verify(args: &VerifyArgs, run: &mut Run) -> Result<(), Failure> {
    let ids: Vec<usize> = if args.criteria.is_empty() {
        (1..=CRITERIA).collect()
    } else {
        args.criteria.clone()
    };
    let mut results = Vec::new();
    for &id in &ids {
        let r = run_criterion(id)?;
        println!("{} ({:.1} s)", r.line(), r.seconds);
        results.push(r);
    }
    let count = |s: Status| results.iter().filter(|r| r.status == s).count();
    let (pass, fail, infeasible) = (count(Status::Pass), count(Status::Fail), count(Status::Infeasible));
    println!("{pass} passed, {fail} failed, {infeasible} infeasible");
    let rows: Vec<_> = results
        .iter()
        .map(|r| json!({ "id": r.id, "status": r.status, "detail": r.detail }))
        .collect();
    run.write_json(
        "verify.json",
        &json!({ "passed": pass, "failed": fail, "infeasible": infeasible, "criteria": rows }),
    )?;
    if infeasible > 0 {
        run.flag(Failure::Certification(format!(
            "{infeasible} criteria are out of reach (schedule infeasible)"
        )));
    }
    if fail > 0 {
        run.flag(Failure::Numerical(format!("{fail} criteria failed")));
    }
    Ok(())
}
