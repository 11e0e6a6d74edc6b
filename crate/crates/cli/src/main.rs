//! `cmv-spectra`: spectra, DOS, Lyapunov exponents, Schur bounds, thin-spectrum
//! constructions and walk diagnostics from JSON configs to CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 2 config error, 3 certification failure,
//! 4 numerical-tolerance failure.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Failure, Run};

#[derive(Parser, Debug)]
#[command(
    name = "cmv-spectra",
    version,
    about = "Spectral computations for periodic phased CMV operators and coined quantum walks"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Input config (a word file, a coin file, or a thin/tower config).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts and the manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Grid size override (band scan, DOS profile or sample grid).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Band-edge tolerance on |Delta| - 2.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for parallel band scans.
    #[arg(long, global = true, env = "CMV_SPECTRA_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Band list of a word: bands.csv and spectrum.json.
    Spectrum,
    /// Density of states with both lower bounds: dos.csv.
    Dos,
    /// Discriminant and Lyapunov exponent on the circle: lyapunov.csv.
    Lyapunov,
    /// Schur values and the Schur DOS bound at band-interior points: schur.csv.
    Schur,
    /// One thin-spectrum refinement: word.json and certificate.json.
    Thin,
    /// A tower of refinements: level_<k>.json words and tower.json.
    Tower,
    /// Walk evolution and transport series: walk.csv and walk.json.
    Walk(WalkArgs),
    /// Runs the acceptance criteria: verify.json.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct WalkArgs {
    /// Horizon N of the two-sided series.
    #[arg(long, default_value_t = 1024)]
    horizon: usize,
    /// Survival window half-width J.
    #[arg(long, default_value_t = 3)]
    j: i64,
    /// Initial position.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    start: i64,
    /// Initial spin.
    #[arg(long, value_enum, default_value_t = SpinArg::Up)]
    spin: SpinArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinArg {
    Up,
    Down,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct VerifyArgs {
    /// Criteria to run, e.g. `1,2,9`; all when omitted.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<usize>,
}

fn setup_threads(threads: Option<usize>) -> Result<(), Failure> {
    match threads {
        Some(0) => Err(Failure::Config("--threads must be positive".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}"))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut run = match setup_threads(cli.global.threads).and_then(|_| Run::new(&cli.global, &cli.command)) {
        Ok(run) => run,
        Err(f) => return report(f),
    };
    // A failed command still leaves a manifest recording why.
    if let Err(f) = commands::dispatch(&cli.global, &cli.command, &mut run) {
        run.flag(f);
    }
    match run.finish(start.elapsed().as_secs_f64()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    eprintln!("error: {f}");
    ExitCode::from(f.code())
}
