use std::f64::consts::{LN_10, PI, TAU};

use serde::{Deserialize, Serialize};

use super::gaps::bands_of;
use super::refine::{plan_refinement, RefineOptions, RefinementCertificate, DEFAULT_QCAP, ETA_GRID};
use crate::cmv::VerblunskyWord;
use crate::error::{Error, Result};
use crate::spectral::{rotation_at, BandList, BandUnit};
use crate::transfer::{CompiledWord, MonodromySource};

/// Exponents at which Hausdorff content is reported.
pub const HAUSDORFF_GAMMAS: [f64; 3] = [0.5, 0.25, 0.1];

/// Largest number of doublings of `n` tried at one level.
const MAX_DOUBLINGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TowerMode {
    ZeroMeasure,
    ZeroHausdorff,
    Olhc,
}

/// Modulus of continuity `h` tested in olhc mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Modulus {
    /// `h(d) = log(1/d)^{-power}`.
    InverseLogPower { power: f64 },
}

impl Modulus {
    /// `ln h(d)` from `ln d`, for `d < 1`.
    pub fn log_h(&self, log_d: f64) -> f64 {
        match *self {
            Modulus::InverseLogPower { power } => -power * (-log_d).ln(),
        }
    }

    pub fn h(&self, d: f64) -> f64 {
        self.log_h(d.ln()).exp()
    }

    /// `g(d) = h(d) log(1/d)` from `ln d`.
    pub fn g_log(&self, log_d: f64) -> f64 {
        (self.log_h(log_d) + (-log_d).ln()).exp()
    }

    /// Checks on the grid `d = 10^{-k}`, `k = 1..=300`, that `g` is
    /// nonincreasing and ends far below its start.
    pub fn check_decay(&self) -> Result<()> {
        let g: Vec<f64> = (1..=300).map(|k| self.g_log(-(k as f64) * LN_10)).collect();
        let monotone = g.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        if !monotone || !(g[g.len() - 1] < 0.5 * g[0]) || !g.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "modulus {self:?}: h(d) log(1/d) does not decay (g(1e-1) = {:.3e}, g(1e-300) = {:.3e})",
                g[0],
                g[g.len() - 1]
            )));
        }
        Ok(())
    }
}

/// Inputs of [`build_tower`].
#[derive(Debug, Clone, Serialize)]
pub struct TowerSchedule {
    pub mode: TowerMode,
    #[serde(skip)]
    pub seed: VerblunskyWord,
    pub eps0: f64,
    /// Modulus tested in olhc mode.
    pub h: Option<Modulus>,
    pub qcap: usize,
    pub eta_grid: usize,
}

impl TowerSchedule {
    pub fn new(mode: TowerMode, seed: VerblunskyWord, eps0: f64) -> Self {
        Self {
            mode,
            seed,
            eps0,
            h: (mode == TowerMode::Olhc).then_some(Modulus::InverseLogPower { power: 2.0 }),
            qcap: DEFAULT_QCAP,
            eta_grid: ETA_GRID,
        }
    }
}

/// Witness of a large DOS increment next to a band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Witness {
    /// Point of the final spectrum (centre of its widest unit).
    pub z_inf: f64,
    /// Chosen end point `alpha e^{-i pi eps}` or `beta e^{i pi eps}`.
    pub z_prime: f64,
    /// DOS mass of the arc between the two, under the final level.
    pub nu: f64,
    /// `ln |z_inf - z_prime|`.
    pub log_chord: f64,
    /// `nu / h(|z_inf - z_prime|)`.
    pub ratio: f64,
    /// False when the arc is below double-precision resolution; then the
    /// band is linearized: `z_inf` sits at its centre, the chord is
    /// `width/2 + pi eps` and `nu` is the half-band mass `1/(2 q)`.
    pub measured: bool,
}
/// Diagnostics of one tower level.
#[derive(Debug, Clone, Serialize)]
pub struct TowerLevel {
    pub level: usize,
    pub q: usize,
    pub eps: f64,
    pub leb: f64,
    pub log_leb: f64,
    /// Decay rate of the level: `eta/(4 l)` except in olhc mode, where it is
    /// the measured `(ln(1/Leb) - ln 3)/q`.
    pub c: f64,
    pub n: usize,
    pub ell: usize,
    pub n_prime: usize,
    pub eta: f64,
    pub distance_to_previous: f64,
    pub distance_to_seed: f64,
    pub bound_holds: bool,
    /// `(gamma, sum of width^gamma)` over the band units.
    pub hausdorff: Vec<(f64, f64)>,
    pub witness: Option<Witness>,
}

/// Levels built so far and the words they produced.
#[derive(Debug, Clone, Serialize)]
pub struct TowerRun {
    pub schedule: TowerSchedule,
    pub levels: Vec<TowerLevel>,
    #[serde(skip)]
    pub words: Vec<VerblunskyWord>,
    #[serde(skip)]
    pub bands: Vec<BandList>,
    /// Reason the run stopped before the requested depth.
    pub stopped: Option<String>,
}

/// `ln eps_n` for level `n >= 2` from the previous level.
fn next_log_eps(mode: TowerMode, n: usize, log_eps_prev: f64, prev_q: usize, prev_log_leb: f64) -> f64 {
    let half = log_eps_prev - 2f64.ln();
    match mode {
        TowerMode::ZeroMeasure => half.min(prev_log_leb - 4f64.ln()),
        TowerMode::ZeroHausdorff => half
            .min(-(2f64.ln()) - prev_q as f64 * (n as f64).ln())
            .min(prev_log_leb - 4f64.ln()),
        TowerMode::Olhc => half.min(prev_log_leb - 3f64.ln()),
    }
}

fn level_c(mode: TowerMode, cert: &RefinementCertificate) -> f64 {
    match mode {
        TowerMode::Olhc => (-cert.log_leb - 3f64.ln()) / cert.q as f64,
        _ => cert.c,
    }
}

/// Whether a level meets its mode's smallness condition.
fn accepts(schedule: &TowerSchedule, level: usize, cert: &RefinementCertificate, prev_log_leb: f64) -> bool {
    match schedule.mode {
        TowerMode::ZeroMeasure => cert.log_leb < prev_log_leb,
        TowerMode::ZeroHausdorff => cert.log_leb < -(cert.q as f64).sqrt(),
        TowerMode::Olhc => {
            let c = level_c(schedule.mode, cert);
            let h = schedule.h.expect("olhc needs h");
            c > 0.0 && h.g_log(-c * cert.q as f64) <= c / (2.0 * level as f64)
        }
    }
}

/// DOS mass of the counterclockwise arc from `a` to `a + len`, `0 <= len < 2 pi`.
fn nu_ccw(word: &CompiledWord, a: f64, len: f64) -> f64 {
    let q = word.period() as f64;
    let (u, v) = (a.rem_euclid(TAU), (a + len).rem_euclid(TAU));
    let (ru, rv) = (rotation_at(word, u).r, rotation_at(word, v).r);
    let wrap = if v < u { TAU * q } else { 0.0 };
    (rv + wrap - ru) / (TAU * q)
}

/// Arcs shorter than this are treated as unresolved.
const RESOLVED_ARC: f64 = 1e-9;

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Witness for a level with band list `bands` and period `q`, measured against the final word.
fn witness(
    h: Modulus,
    last: &CompiledWord,
    last_bands: &BandList,
    bands: &BandList,
    q: usize,
    log_eps_next: f64,
) -> Option<Witness> {
    let z_inf = last_bands
        .units
        .iter()
        .max_by(|a, b| a.log_width.total_cmp(&b.log_width))?
        .arc
        .mid();
    let dist = |u: &BandUnit| {
        if u.arc.contains(z_inf) {
            0.0
        } else {
            let d = |t: f64| ((t - z_inf + PI).rem_euclid(TAU) - PI).abs();
            d(u.arc.left).min(d(u.arc.right))
        }
    };
    let unit = bands.units.iter().min_by(|a, b| dist(a).total_cmp(&dist(b)))?;
    let shift = PI * log_eps_next.exp();
    if unit.arc.length() < RESOLVED_ARC || shift < RESOLVED_ARC {
        let log_chord = log_add(unit.log_width - 2f64.ln(), PI.ln() + log_eps_next);
        let nu = 0.5 / q as f64;
        return Some(Witness {
            z_inf,
            z_prime: (unit.arc.right + shift).rem_euclid(TAU),
            nu,
            log_chord,
            ratio: nu / h.log_h(log_chord).exp(),
            measured: false,
        });
    }
    [unit.arc.left - shift, unit.arc.right + shift]
        .iter()
        .map(|&zp| {
            let d = (zp - z_inf + PI).rem_euclid(TAU) - PI;
            let nu = if d >= 0.0 {
                nu_ccw(last, z_inf, d)
            } else {
                nu_ccw(last, zp, -d)
            };
            let chord = 2.0 * (0.5 * d).sin().abs();
            let ratio = if chord > 0.0 && chord < 1.0 {
                nu / h.h(chord)
            } else {
                f64::NAN
            };
            Witness {
                z_inf,
                z_prime: zp.rem_euclid(TAU),
                nu,
                log_chord: chord.ln(),
                ratio,
                measured: true,
            }
        })
        .max_by(|a, b| a.nu.total_cmp(&b.nu))
}

/// Runs the tower and returns whatever levels were completed, with the error
/// that stopped it early (if any).
pub fn build_tower_partial(schedule: &TowerSchedule, depth: usize) -> (TowerRun, Option<Error>) {
    let mut run = TowerRun {
        schedule: schedule.clone(),
        levels: Vec::new(),
        words: Vec::new(),
        bands: Vec::new(),
        stopped: None,
    };
    let err = tower_levels(schedule, depth, &mut run).err();
    run.stopped = err.as_ref().map(|e| e.to_string());
    (run, err)
}

/// Iterated thin-spectrum refinements under the schedule of `schedule.mode`.
pub fn build_tower(schedule: &TowerSchedule, depth: usize) -> Result<TowerRun> {
    match build_tower_partial(schedule, depth) {
        (run, None) => Ok(run),
        (_, Some(e)) => Err(e),
    }
}

/// Message of `e` without a repeated "schedule infeasible" prefix.
fn reason(e: &Error) -> String {
    match e {
        Error::ScheduleInfeasible(msg) => msg.clone(),
        other => other.to_string(),
    }
}

fn tower_levels(schedule: &TowerSchedule, depth: usize, run: &mut TowerRun) -> Result<()> {
    if depth == 0 {
        return Err(Error::InvalidArgument("tower depth must be at least 1".into()));
    }
    if !(schedule.eps0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps0 must be positive, got {}",
            schedule.eps0
        )));
    }
    if schedule.mode == TowerMode::Olhc {
        schedule
            .h
            .ok_or_else(|| Error::InvalidArgument("olhc mode needs a modulus h".into()))?
            .check_decay()?;
    }
    let options = RefineOptions {
        qcap: schedule.qcap,
        eta_grid: schedule.eta_grid,
    };
    let mut prev = schedule.seed.clone();
    let mut prev_log_leb = bands_of(&prev)?.log_measure();
    let mut log_eps = (schedule.eps0 / 2.0).ln();
    for level in 1..=depth {
        if level > 1 {
            log_eps = next_log_eps(schedule.mode, level, log_eps, prev.q(), prev_log_leb);
        }
        let eps = if level == 1 { schedule.eps0 / 2.0 } else { log_eps.exp() };
        if !(eps >= f64::MIN_POSITIVE) {
            return Err(Error::ScheduleInfeasible(format!(
                "level {level}: eps = e^{log_eps:.1} is below double precision"
            )));
        }
        let plan = plan_refinement(&prev, eps, options)
            .map_err(|e| Error::ScheduleInfeasible(format!("level {level} (eps = {eps:.3e}): {}", reason(&e))))?;
        let mut n = plan.n_min;
        let cert = loop {
            let cert = plan
                .finish(n)
                .map_err(|e| Error::ScheduleInfeasible(format!("level {level} at n = {n}: {}", reason(&e))))?;
            if accepts(schedule, level, &cert, prev_log_leb) {
                break cert;
            }
            if n >= plan.n_min << MAX_DOUBLINGS {
                return Err(Error::ScheduleInfeasible(format!(
                    "level {level}: condition of {:?} mode not met up to n = {n}",
                    schedule.mode
                )));
            }
            n *= 2;
        };
        let hausdorff = HAUSDORFF_GAMMAS
            .iter()
            .map(|&g| (g, cert.bands.hausdorff_content(g)))
            .collect();
        run.levels.push(TowerLevel {
            level,
            q: cert.q,
            eps,
            leb: cert.leb,
            log_leb: cert.log_leb,
            c: level_c(schedule.mode, &cert),
            n: cert.n,
            ell: cert.ell,
            n_prime: cert.n_prime,
            eta: cert.eta,
            distance_to_previous: cert.distance,
            distance_to_seed: cert.word.distance(&schedule.seed),
            bound_holds: cert.bound_holds,
            hausdorff,
            witness: None,
        });
        run.words.push(cert.word.clone());
        run.bands.push(cert.bands.clone());
        prev = cert.word;
        prev_log_leb = cert.log_leb;
        if schedule.mode == TowerMode::Olhc {
            attach_witnesses(schedule, run, log_eps)?;
        }
    }
    Ok(())
}

/// Recomputes every witness against the newest level, which stands in for the limit.
fn attach_witnesses(schedule: &TowerSchedule, run: &mut TowerRun, log_eps_last: f64) -> Result<()> {
    let h = schedule.h.expect("olhc needs h");
    let last_word = CompiledWord::new(run.words.last().expect("at least one level"));
    let last_bands = run.bands.last().expect("at least one level");
    let top = run.levels.len();
    for i in 0..top {
        let log_eps_next = if i + 1 < top {
            run.levels[i + 1].eps.ln()
        } else {
            next_log_eps(
                schedule.mode,
                top + 1,
                log_eps_last,
                run.levels[i].q,
                run.levels[i].log_leb,
            )
        };
        let q = run.levels[i].q;
        run.levels[i].witness = witness(h, &last_word, last_bands, &run.bands[i], q, log_eps_next);
    }
    Ok(())
}
