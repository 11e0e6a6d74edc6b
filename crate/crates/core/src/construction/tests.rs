use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gaps::bands_of;
use super::*;
use crate::cmv::VerblunskyWord;
use crate::error::Error;
use crate::spectral::{band_list_of, EDGE_TOL};
use crate::test_util::random_word;
use crate::transfer::{CompiledWord, MonodromySource};

fn constant(a: f64) -> VerblunskyWord {
    VerblunskyWord::constant(2, Complex64::new(a, 0.0), 0.0).unwrap()
}

/// Signed angular difference in `(-pi, pi]`.
fn angle_diff(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(TAU) - PI
}

fn assert_odd_phase_perturbation(out: &VerblunskyWord, seed: &VerblunskyWord, eps: f64) {
    for (j, (p, m)) in out.pairs().iter().zip(seed.pairs()).enumerate() {
        assert_eq!(p.alpha(), m.alpha());
        if j % 2 == 0 {
            assert_eq!(p.lambda_arg(), m.lambda_arg());
        }
        assert!((p.lambda() - m.lambda()).norm() <= eps);
    }
}

#[test]
fn open_gaps_splits_repeated_constant_word() {
    // Period-1 data written at period 12: every other gap is closed.
    let seed = VerblunskyWord::constant(12, Complex64::new(0.5, 0.0), 0.0).unwrap();
    assert!(bands_of(&seed).unwrap().gaps.len() < 12);
    let eps = 0.2;
    let out = open_gaps(&seed, eps).unwrap();
    assert!(out.epsilon > 0.0 && out.epsilon <= eps);
    let bands = bands_of(&out.word).unwrap();
    assert_eq!(bands.bands.len(), 12);
    assert!(bands.gaps.iter().all(|g| g.length() > EDGE_TOL));
    assert_odd_phase_perturbation(&out.word, &seed, eps);
}

/// With `alpha = 0` the discriminant has modulus at most 2 on the whole
/// circle for any phases, so no phase perturbation opens a gap.
#[test]
fn free_word_gaps_stay_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phases: Vec<(Complex64, f64)> = (0..4)
        .map(|_| (Complex64::new(0.0, 0.0), rand::Rng::gen_range(&mut rng, -PI..PI)))
        .collect();
    let w = VerblunskyWord::from_parts(&phases, 0.5).unwrap();
    let c = CompiledWord::new(&w);
    for i in 0..2000 {
        let d = c.circle(TAU * i as f64 / 2000.0, false, false).discriminant();
        assert!(d.abs() <= 2.0 + 1e-9);
    }
    let free = VerblunskyWord::free(2).unwrap();
    assert!(matches!(open_gaps(&free, 0.2), Err(Error::GapOpeningFailed { .. })));
}

/// At `q = 2` there is one odd site, so the ladder only rotates the spectrum.
#[test]
fn single_odd_site_cannot_open_gaps() {
    let w = constant(0.5);
    assert_eq!(bands_of(&w).unwrap().gaps.len(), 1);
    assert!(matches!(open_gaps(&w, 0.2), Err(Error::GapOpeningFailed { .. })));
    let out = open_gaps(&w.repeat(2).unwrap(), 0.2).unwrap();
    assert_eq!(out.band_count, 4);
}

#[test]
fn open_gaps_is_identity_when_open() {
    let w =
        VerblunskyWord::from_parts(&[(Complex64::new(0.5, 0.0), 0.0), (Complex64::new(0.3, 0.1), 0.4)], 0.6).unwrap();
    assert_eq!(bands_of(&w).unwrap().gaps.len(), 2);
    let out = open_gaps(&w, 0.1).unwrap();
    assert_eq!(out.epsilon, 0.0);
    assert!(out.word == w);
    assert_eq!(out.band_count, 2);
}

#[test]
fn open_gaps_rejects_bad_budget() {
    assert!(matches!(open_gaps(&constant(0.5), 0.0), Err(Error::InvalidArgument(_))));
}

#[test]
fn rotation_by_zero_is_identity() {
    let w = constant(0.3);
    assert_eq!(rotate_spectrum(&w, 0.0), w);
}

#[test]
fn rotating_free_word_keeps_circle() {
    let w = rotate_spectrum(&VerblunskyWord::free(2).unwrap(), PI);
    let b = bands_of(&w).unwrap();
    assert!(b.gaps.is_empty());
    assert!((b.measure() - TAU).abs() < 1e-9);
}

#[test]
fn rotation_moves_gap_centres() {
    let w = constant(0.5);
    let phi = PI / 5.0;
    let before = bands_of(&w).unwrap();
    let after = bands_of(&rotate_spectrum(&w, phi)).unwrap();
    assert_eq!(before.gaps.len(), after.gaps.len());
    // One gap of the constant word is centred at 0; it moves to pi/5.
    assert!(before.gaps.iter().any(|g| angle_diff(g.mid(), 0.0).abs() < 1e-9));
    assert!(after.gaps.iter().any(|g| angle_diff(g.mid(), phi).abs() < 1e-9));
    for g in &before.gaps {
        let moved = g.mid() + phi;
        assert!(after.gaps.iter().any(|h| angle_diff(h.mid(), moved).abs() < 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_translates_band_list(seed in any::<u64>(), phi in -PI..PI) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, 4, 0.8);
        let base = bands_of(&w).unwrap();
        let rot = bands_of(&rotate_spectrum(&w, phi)).unwrap();
        let shifted = base.shifted(phi);
        prop_assert_eq!(rot.units.len(), shifted.units.len());
        prop_assert!((rot.measure() - base.measure()).abs() < 1e-9);
        for u in &shifted.units {
            let hit = rot.units.iter().any(|v| {
                angle_diff(v.arc.left, u.arc.left).abs() < 1e-8
                    && (v.arc.length() - u.arc.length()).abs() < 1e-8
            });
            prop_assert!(hit, "unit {:?} not translated", u.arc);
        }
    }
}

#[test]
fn block_layout_matches_formula() {
    assert_eq!(block_layout(3, 2, 2, 30).unwrap(), vec![0, 20, 40, 60]);
    assert!(matches!(
        block_layout(3, 2, 2, 24),
        Err(Error::NTooSmall { n: 24, bound: 24 })
    ));
}

fn single_member_family(w: &VerblunskyWord) -> CoverFamily {
    CoverFamily {
        base: w.clone(),
        members: vec![w.clone()],
        rotations: vec![0.0],
        gamma: 0.0,
        k: 0,
        seed_period: w.q(),
        certified_grid: 0,
        base_bands: bands_of(w).unwrap(),
    }
}

#[test]
fn single_member_concatenation_keeps_spectrum() {
    let w = constant(0.5);
    let fam = single_member_family(&w);
    let out = concatenate_cover(&fam, 5).unwrap();
    assert_eq!(out.q(), 10);
    assert_eq!(out, w.repeat(5).unwrap());
    let (a, b) = (bands_of(&w).unwrap(), bands_of(&out).unwrap());
    assert_eq!(a.bands.len(), b.bands.len());
    for (x, y) in a.bands.iter().zip(&b.bands) {
        assert!((x.left - y.left).abs() < 1e-9 && (x.right - y.right).abs() < 1e-9);
    }
}

#[test]
fn structured_word_matches_materialized() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (a, b) = (random_word(&mut rng, 4, 0.6), random_word(&mut rng, 6, 0.6));
    let s = StructuredWord::new(vec![(a.clone(), 3), (b.clone(), 2)]).unwrap();
    let mut pairs = a.repeat(3).unwrap().pairs().to_vec();
    pairs.extend_from_slice(b.repeat(2).unwrap().pairs());
    let flat = CompiledWord::new(&VerblunskyWord::new(pairs, 0.6).unwrap());
    assert_eq!(s.period(), 24);
    for tau in [0.1, 1.3, 2.9, 4.4, 6.0] {
        let (x, y) = (s.circle(tau, true, true), flat.circle(tau, true, true));
        assert!((x.discriminant() - y.discriminant()).abs() < 1e-10 * x.discriminant().abs().max(1.0));
        let (dx, dy) = (
            x.discriminant_derivative().unwrap(),
            y.discriminant_derivative().unwrap(),
        );
        assert!((dx - dy).abs() < 1e-9 * dx.abs().max(1.0));
        assert!((x.rotation().unwrap().r - y.rotation().unwrap().r).abs() < 1e-9);
    }
}

/// For narrow resolved bands the discriminant is close to linear across the
/// band, so the arc length should match the derivative width `4/|Delta'|`.
#[test]
fn derivative_width_matches_resolved_arcs() {
    let w = VerblunskyWord::constant(24, Complex64::new(0.9, 0.0), 0.0).unwrap();
    let w = open_gaps(&w, 0.3).unwrap().word;
    let c = CompiledWord::new(&w);
    let bands = band_list_of(&c, 512 * 24, EDGE_TOL).unwrap();
    let mut checked = 0;
    for u in &bands.units {
        let len = u.arc.length();
        if !(1e-8..=1e-3).contains(&len) {
            continue;
        }
        let d = c.circle(u.arc.mid(), true, false).discriminant_derivative().unwrap();
        let rel = (4.0 / d.abs() - len).abs() / len;
        assert!(rel < 1e-2, "unit {:?}: arc {len:e}, 4/|D'| {:e}", u.arc, 4.0 / d.abs());
        checked += 1;
    }
    assert!(checked >= 4, "only {checked} narrow bands");
}

#[test]
fn minimal_n_prime_is_minimal() {
    for (q, delta) in [(2, 0.1), (2, 5.0), (6, 0.3), (40, 1.0)] {
        let n = minimal_n_prime(q, delta).unwrap();
        let ok = |n: usize| 4.0 * PI / (n as f64 * q as f64) < delta / 6.0;
        assert!(ok(n));
        assert!(n == 1 || !ok(n - 1));
    }
    assert_eq!(minimal_n_prime(2, 1e-300), None);
}

/// The cheapest seed found: constant `alpha = 0.9`, refined at `delta = 5`.
fn cheap_seed() -> (VerblunskyWord, f64) {
    (constant(0.9), 5.0)
}

#[test]
fn thin_refine_certificate_holds() {
    let (seed, delta) = cheap_seed();
    let plan = plan_refinement(&seed, delta, RefineOptions::default()).unwrap();
    assert_eq!(plan.family.len(), 2 * plan.family.k + 1);
    assert!(plan.eta > 0.0);
    let cert = plan.finish(plan.n_min).unwrap();
    assert_eq!(cert.q, plan.n_min * seed.q());
    assert_eq!(cert.word.q(), cert.q);
    assert!(
        cert.bound_holds,
        "log Leb {} > log bound {}",
        cert.log_leb, cert.log_claimed_bound
    );
    assert!(cert.exponential_holds);
    assert!(cert.distance <= delta);
    assert!(cert.word.max_alpha() <= cert.word.r());
    assert_eq!(cert.bands.units.len(), cert.q);
    for m in &plan.family.members {
        assert!(m.distance(&plan.family.base) <= delta / 2.0);
    }
}

#[test]
fn infeasible_cover_is_reported() {
    // Constant alpha = 1/2 at delta = 0.1 needs thousands of members.
    let err = plan_refinement(&constant(0.5), 0.1, RefineOptions::default()).unwrap_err();
    assert!(matches!(err, Error::ScheduleInfeasible(_)), "{err}");
}

#[test]
fn modulus_decay_check() {
    let h = Modulus::InverseLogPower { power: 2.0 };
    h.check_decay().unwrap();
    let g = h.g_log(-10.0 * std::f64::consts::LN_10);
    assert!((g - 1.0 / (10.0 * std::f64::consts::LN_10)).abs() < 1e-14);
    assert!((h.h(1e-10) - g * g).abs() < 1e-14);
    for p in [0.5, 1.0] {
        assert!(Modulus::InverseLogPower { power: p }.check_decay().is_err());
    }
}

#[test]
fn schedule_serde_names() {
    let m: Modulus = serde_json::from_str(r#"{"kind": "inverse-log-power", "power": 2.0}"#).unwrap();
    assert_eq!(m, Modulus::InverseLogPower { power: 2.0 });
    let mode: TowerMode = serde_json::from_str(r#""zero_hausdorff""#).unwrap();
    assert_eq!(mode, TowerMode::ZeroHausdorff);
}

#[test]
fn olhc_rejects_slow_modulus() {
    let mut s = TowerSchedule::new(TowerMode::Olhc, constant(0.9), 10.0);
    s.h = Some(Modulus::InverseLogPower { power: 1.0 });
    assert!(matches!(build_tower(&s, 1), Err(Error::InvalidArgument(_))));
}

#[test]
fn tower_depth_one_is_thin_refine() {
    let (seed, delta) = cheap_seed();
    let s = TowerSchedule::new(TowerMode::ZeroMeasure, seed.clone(), 2.0 * delta);
    let run = build_tower(&s, 1).unwrap();
    assert_eq!(run.levels.len(), 1);
    let plan = plan_refinement(&seed, delta, RefineOptions::default()).unwrap();
    let cert = plan.finish(plan.n_min).unwrap();
    assert!(run.words[0] == cert.word);
    assert_eq!(run.levels[0].log_leb, cert.log_leb);
    assert!(run.levels[0].distance_to_seed <= s.eps0);
}
