use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::cover::{block_layout, concatenate_cover, cover_family, CoverFamily, StructuredWord};
use super::gaps::{open_gaps, GapOpenResult, CONSTRUCTION_GRID_PER_Q};
use crate::cmv::VerblunskyWord;
use crate::error::{Error, Result};
use crate::spectral::{band_list_of, map_grid, BandList, EDGE_TOL};
use crate::transfer::{circle_lyapunov, CompiledWord};

/// Default hard cap on output periods.
pub const DEFAULT_QCAP: usize = 50_000;
/// Points of the `tau` grid on which `eta` is estimated.
pub const ETA_GRID: usize = 4096;
/// Fraction of the grid minimum kept as `eta`.
const ETA_SAFETY: f64 = 0.95;

/// Knobs of [`thin_refine_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefineOptions {
    pub qcap: usize,
    pub eta_grid: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            qcap: DEFAULT_QCAP,
            eta_grid: ETA_GRID,
        }
    }
}

/// Stages (i)-(iv) of a refinement: everything that does not depend on `n`.
#[derive(Debug, Clone, Serialize)]
pub struct RefinePlan {
    #[serde(skip)]
    pub seed: VerblunskyWord,
    pub delta: f64,
    pub n_prime: usize,
    pub gaps: GapOpenResult,
    pub family: CoverFamily,
    /// `min_tau max_j L(tau, U_j)` on the grid, before the safety margin.
    pub eta_grid_min: f64,
    pub eta: f64,
    /// Smallest admissible multiplier, `4 l n' + 1`.
    pub n_min: usize,
    pub options: RefineOptions,
}

/// Measured outcome of one refinement.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementCertificate {
    #[serde(skip)]
    pub word: VerblunskyWord,
    #[serde(skip)]
    pub bands: BandList,
    pub q: usize,
    pub n: usize,
    pub n_prime: usize,
    pub ell: usize,
    pub gamma: f64,
    pub k: usize,
    pub gap_epsilon: f64,
    pub eta: f64,
    /// `c = eta / (4 l)`.
    pub c: f64,
    pub leb: f64,
    pub log_leb: f64,
    /// `ln(4 pi n q) - n q eta / (2 l)`.
    pub log_claimed_bound: f64,
    pub claimed_bound: f64,
    /// `log_claimed_bound - log_leb`; nonnegative when the certificate holds.
    pub log_slack: f64,
    pub bound_holds: bool,
    /// Whether `Leb <= e^{-c n q}`.
    pub exponential_holds: bool,
    /// Coefficient-wise sup distance to the seed.
    pub distance: f64,
}

/// Minimal `n'` with `4 pi / (n' q) < delta / 6`, or `None` if it does not fit in `usize`.
pub fn minimal_n_prime(q: usize, delta: f64) -> Option<usize> {
    let guess = (24.0 * PI / (delta * q as f64)).floor().max(1.0);
    if !(guess < 1e15) {
        return None;
    }
    let mut n = guess as usize;
    while 4.0 * PI / (n as f64 * q as f64) >= delta / 6.0 {
        n += 1;
    }
    Some(n)
}

/// `min_tau max_j L(tau, U_j)` over an `n`-point grid. Member `j` is the base
/// rotated by `phi_j`, so its exponent at `tau` is the base exponent at `tau - phi_j`.
pub fn estimate_eta(family: &CoverFamily, n: usize) -> f64 {
    let base = CompiledWord::new(&family.base);
    let grid: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    map_grid(&grid, |t| {
        family
            .rotations
            .iter()
            .map(|&phi| circle_lyapunov(&base, t - phi))
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

/// Gap opening, cover and `eta` for `seed` at distance `delta`.
pub fn plan_refinement(seed: &VerblunskyWord, delta: f64, options: RefineOptions) -> Result<RefinePlan> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let q = seed.q();
    let n_prime = match minimal_n_prime(q, delta) {
        Some(n) if n.saturating_mul(q) <= options.qcap => n,
        _ => {
            return Err(Error::ScheduleInfeasible(format!(
                "bands below delta/6 = {:.3e} need member period 24 pi/delta = {:.3e} > cap {}",
                delta / 6.0,
                24.0 * PI / delta,
                options.qcap
            )))
        }
    };
    let gaps = open_gaps(&seed.repeat(n_prime)?, delta / 2.0)?;
    let family = cover_family(&gaps.word, delta)?.with_seed_period(q)?;
    let n_min = 4 * family.len() * n_prime + 1;
    if n_min * q > options.qcap {
        return Err(Error::ScheduleInfeasible(format!(
            "cover of {} members at n' = {n_prime} (min gap {:.3e}) needs period at least {} > cap {}",
            family.len(),
            gaps.min_gap,
            n_min * q,
            options.qcap
        )));
    }
    let eta_grid_min = estimate_eta(&family, options.eta_grid);
    if !(eta_grid_min > 0.0) {
        return Err(Error::EtaNonPositive(eta_grid_min));
    }
    Ok(RefinePlan {
        seed: seed.clone(),
        delta,
        n_prime,
        gaps,
        family,
        eta_grid_min,
        eta: ETA_SAFETY * eta_grid_min,
        n_min,
        options,
    })
}

impl RefinePlan {
    /// Stages (v)-(vi): concatenation at multiplier `n` and the measured certificate.
    pub fn finish(&self, n: usize) -> Result<RefinementCertificate> {
        let q = self.seed.q();
        let ell = self.family.len();
        block_layout(ell, self.n_prime, q, n)?;
        if n * q > self.options.qcap {
            return Err(Error::ScheduleInfeasible(format!(
                "period {} exceeds cap {}",
                n * q,
                self.options.qcap
            )));
        }
        let word = concatenate_cover(&self.family, n)?;
        let structured = StructuredWord::from_cover(&self.family, n)?;
        let nq = n * q;
        let bands = band_list_of(&structured, CONSTRUCTION_GRID_PER_Q * nq, EDGE_TOL)?;
        let leb = bands.measure();
        let log_leb = bands.log_measure();
        let nqf = nq as f64;
        let log_claimed_bound = (4.0 * PI * nqf).ln() - nqf * self.eta / (2.0 * ell as f64);
        let c = self.eta / (4.0 * ell as f64);
        Ok(RefinementCertificate {
            distance: word.distance(&self.seed),
            word,
            bands,
            q: nq,
            n,
            n_prime: self.n_prime,
            ell,
            gamma: self.family.gamma,
            k: self.family.k,
            gap_epsilon: self.gaps.epsilon,
            eta: self.eta,
            c,
            leb,
            log_leb,
            log_claimed_bound,
            claimed_bound: log_claimed_bound.exp(),
            log_slack: log_claimed_bound - log_leb,
            bound_holds: log_leb <= log_claimed_bound,
            exponential_holds: log_leb <= -c * nqf,
        })
    }
}

/// One thin-spectrum refinement with default options.
pub fn thin_refine(seed: &VerblunskyWord, delta: f64, n: usize) -> Result<RefinementCertificate> {
    thin_refine_with(seed, delta, n, RefineOptions::default())
}

pub fn thin_refine_with(
    seed: &VerblunskyWord,
    delta: f64,
    n: usize,
    options: RefineOptions,
) -> Result<RefinementCertificate> {
    plan_refinement(seed, delta, options)?.finish(n)
}
