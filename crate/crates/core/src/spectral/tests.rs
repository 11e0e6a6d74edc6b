use std::f64::consts::{FRAC_PI_3, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cmv::{apply_operator, operator_entry, WindowVector};
use crate::test_util::random_word;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn free() -> VerblunskyWord {
    VerblunskyWord::free(2).unwrap()
}

fn half() -> VerblunskyWord {
    VerblunskyWord::constant(2, c(0.5, 0.0), 0.0).unwrap()
}

/// Random words whose gaps are all open (checked on the band list).
fn open_gap_words(seed: u64, count: usize) -> Vec<Spectrum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let q = 2 * rng.gen_range(1..=4);
        let w = random_word(&mut rng, q, 0.8);
        let s = Spectrum::from_word(&w).unwrap();
        let gaps_ok = s.bands().gaps.iter().all(|g| g.length() > 1e-3);
        if s.bands().gaps.len() == q && gaps_ok {
            out.push(s);
        }
    }
    out
}

fn interior_points(s: &Spectrum, rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let units = &s.bands().units;
    (0..count)
        .map(|_| {
            let u = &units[rng.gen_range(0..units.len())];
            let f = rng.gen_range(0.02..0.98);
            u.arc.left + f * u.arc.length()
        })
        .collect()
}

#[test]
fn free_word_is_one_full_band() {
    let b = band_list(&free(), 64, EDGE_TOL).unwrap();
    assert_eq!(b.bands.len(), 1);
    assert!((b.bands[0].length() - TAU).abs() < 1e-12);
    assert!(b.gaps.is_empty());
    assert_eq!(b.units.len(), 2);
    assert!((b.measure() - TAU).abs() < 1e-9);
}

#[test]
fn half_word_bands() {
    let b = band_list(&half(), 1024, EDGE_TOL).unwrap();
    assert_eq!(b.bands.len(), 1);
    assert!((b.bands[0].left - FRAC_PI_3).abs() < 1e-12, "{:?}", b.bands);
    assert!((b.bands[0].right - 5.0 * FRAC_PI_3).abs() < 1e-12);
    assert_eq!(b.gaps.len(), 1);
    assert!((b.gaps[0].length() - 2.0 * FRAC_PI_3).abs() < 1e-12);
    assert_eq!(b.touch_points.len(), 1);
    assert!((b.touch_points[0] - PI).abs() < 1e-6);
    for r in &b.edge_residuals {
        assert!(r.abs() < 1e-10);
    }
}

#[test]
fn grid_too_coarse() {
    assert!(matches!(
        band_list(&half(), 8, EDGE_TOL),
        Err(crate::Error::GridTooCoarse { .. })
    ));
}

#[test]
fn rotating_even_phases_shifts_bands() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = random_word(&mut rng, 4, 0.7);
    let phi = 0.37;
    let args: Vec<f64> = w
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, p)| p.lambda_arg() + if i % 2 == 0 { phi } else { 0.0 })
        .collect();
    let rotated = w.with_lambda_args(&args).unwrap();
    let b0 = band_list(&w, 512, EDGE_TOL).unwrap().shifted(phi);
    let b1 = band_list(&rotated, 512, EDGE_TOL).unwrap();
    assert_eq!(b0.bands.len(), b1.bands.len());
    for (x, y) in b0.bands.iter().zip(&b1.bands) {
        assert!((x.left - y.left).abs() < 1e-10 && (x.right - y.right).abs() < 1e-10);
    }
}

#[test]
fn bands_match_discriminant_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let q = 2 * rng.gen_range(1..=4);
        let w = random_word(&mut rng, q, 0.9);
        let s = Spectrum::from_word(&w).unwrap();
        let b = s.bands();
        assert_eq!(b.units.len(), q);
        assert!(b.bands.len() <= q);
        for i in 0..3000 {
            let t = TAU * (i as f64 + 0.5) / 3000.0;
            let d = s.discriminant(t).abs();
            let inside = b.band_containing(t).is_some();
            if d < 2.0 - 1e-9 {
                assert!(inside, "tau {t} has |Delta| = {d} but no band");
            } else if d > 2.0 + 1e-9 {
                assert!(!inside, "tau {t} has |Delta| = {d} inside a band");
            }
        }
        for r in &b.edge_residuals {
            assert!(r.abs() < 1e-10, "{r}");
        }
    }
}

#[test]
fn rotation_angle_examples() {
    let s = Spectrum::from_word(&free()).unwrap();
    for t in [0.1, 1.0, 2.5, 3.0] {
        assert!((s.rotation_angle(t).unwrap() - t).abs() < 1e-12);
    }
    let h = Spectrum::from_word(&half()).unwrap();
    assert!((h.rotation_angle(PI).unwrap() - PI).abs() < 1e-7);
    for e in [FRAC_PI_3, 5.0 * FRAC_PI_3] {
        let th = h
            .rotation_angle(e + 1e-14)
            .unwrap_or_else(|_| h.rotation_angle(e - 1e-14).unwrap());
        assert!(th.min((th - PI).abs()) < 1e-6);
    }
    assert!(matches!(h.rotation_angle(0.0), Err(crate::Error::OutsideBand { .. })));
}

#[test]
fn free_density_routes() {
    let s = Spectrum::from_word(&free()).unwrap();
    for t in [0.3, 1.7, 4.0] {
        for route in [DosRoute::Numeric, DosRoute::Itrace] {
            let d = s.dos_density(t, route).unwrap();
            assert!((d - 1.0 / TAU).abs() < 1e-9, "{route:?} {d}");
        }
        assert!((s.dos_lower_bound(t).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-12);
        assert!((s.schur_dos_bound(t).unwrap() - 1.0 / TAU).abs() < 1e-12);
        let sv = s.schur_values(t).unwrap();
        assert!(sv.values.iter().all(|v| v.norm() < 1e-12));
    }
}

#[test]
fn density_routes_agree_and_chain_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in open_gap_words(4, 10) {
        for t in interior_points(&s, &mut rng, 10) {
            let n = s.dos_density(t, DosRoute::Numeric).unwrap();
            let i = s.dos_density(t, DosRoute::Itrace).unwrap();
            assert!((n - i).abs() < 1e-6 * i.max(1.0), "{n} {i}");
            let sb = s.schur_dos_bound(t).unwrap();
            let lb = s.dos_lower_bound(t).unwrap();
            assert!(i >= sb - 1e-8 && sb >= lb - 1e-9, "{i} {sb} {lb}");
        }
    }
}

#[test]
fn unit_masses_are_one_over_q() {
    for s in open_gap_words(5, 5) {
        let q = s.q() as f64;
        for u in &s.bands().units {
            let m = s.unit_mass(u, 64, DosRoute::Itrace).unwrap();
            assert!((m - 1.0 / q).abs() < 1e-6, "{m}");
        }
    }
}

#[test]
fn schur_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for s in open_gap_words(7, 5) {
        for t in interior_points(&s, &mut rng, 5) {
            let fp = s.schur_values(t).unwrap();
            let ev = s.schur_values_eigenvector(t, 1e-6).unwrap();
            for (a, b) in fp.values.iter().zip(&ev) {
                assert!(a.norm() < 1.0);
                assert!((a - b).norm() < 1e-4, "{a} {b}");
            }
            let e = Complex64::from_polar(1.0, t);
            for (xi, sv) in fp.fixed_points.iter().zip(&fp.values) {
                assert!((xi - (e * sv).conj()).norm() < 1e-14);
            }
        }
    }
}

fn brute_force_restriction(w: &VerblunskyWord, n: usize) -> Vec<f64> {
    let size = n * w.q();
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(size, size);
    for row in 0..size as i64 {
        for col in row - 2..=row + 2 {
            let e = operator_entry(w, row, col);
            let cc = col.rem_euclid(size as i64) as usize;
            m[(row as usize, cc)] += e;
        }
    }
    let ev = m.schur().eigenvalues().unwrap();
    let mut t: Vec<f64> = ev.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
    t.sort_by(f64::total_cmp);
    t
}

fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn multiset_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|&x| {
            match (0..b.len())
                .filter(|&j| !used[j])
                .min_by(|&i, &j| circ(x, b[i]).total_cmp(&circ(x, b[j])))
            {
                Some(j) if circ(x, b[j]) < tol => {
                    used[j] = true;
                    true
                }
                _ => false,
            }
        })
}

#[test]
fn free_restriction_matches_brute_force() {
    let pts = periodic_restriction_spectrum(&free(), 4).unwrap();
    assert_eq!(pts.len(), 8);
    let bf = brute_force_restriction(&free(), 4);
    assert!(multiset_close(&pts, &bf, 1e-8), "{pts:?} {bf:?}");
}

#[test]
fn random_restrictions_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let q = 2 * rng.gen_range(1..=3);
        let w = random_word(&mut rng, q, 0.8);
        for n in [1, 2, 3, 5] {
            let pts = periodic_restriction_spectrum(&w, n).unwrap();
            assert_eq!(pts.len(), n * q);
            let bf = brute_force_restriction(&w, n);
            assert!(multiset_close(&pts, &bf, 1e-7), "q={q} n={n}\n{pts:?}\n{bf:?}");
        }
    }
    // The constant word has a closed gap at pi where Phi = -I.
    let pts = periodic_restriction_spectrum(&half(), 4).unwrap();
    assert!(multiset_close(&pts, &brute_force_restriction(&half(), 4), 1e-7));
}

#[test]
fn restriction_cdf_converges() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = random_word(&mut rng, 4, 0.7);
    let s = Spectrum::from_word(&w).unwrap();
    let r0 = s.rotation_number(0.0);
    let cdf = |t: f64| (s.rotation_number(t) - r0) / (TAU * 4.0);
    for n in [8, 16, 32] {
        let pts = s.periodic_restriction_spectrum(n).unwrap();
        assert!(empirical_cdf_distance(&pts, cdf) <= 3.0 / n as f64);
    }
}

#[test]
fn moments_match_operator_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for q in [2usize, 4, 6] {
        let w = random_word(&mut rng, q, 0.8);
        let s = Spectrum::from_word(&w).unwrap();
        for k in 0..=8i32 {
            let m = s.integrate_nu(|t| Complex64::from_polar(1.0, k as f64 * t), 48);
            let mut diag = Complex64::new(0.0, 0.0);
            for n in 0..q as i64 {
                let mut v = WindowVector::delta(n, k as i64 + 3);
                for _ in 0..k {
                    v = apply_operator(&w, &v, false, true).unwrap();
                }
                diag += v.get(n);
            }
            diag /= q as f64;
            assert!((m - diag).norm() < 1e-6, "q={q} k={k}: {m} vs {diag}");
        }
    }
}

#[test]
fn profile_invariants() {
    let s = Spectrum::from_word(&half()).unwrap();
    let p = s.dos_profile(2000);
    assert!((p.total_mass() - 1.0).abs() < 1e-12);
    assert!(p.cdf.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    for i in 0..p.tau_grid.len() {
        assert!(p.density[i] >= 0.0);
        if p.lower_bound[i] > 0.0 {
            assert!(p.density[i] >= p.schur_bound[i] - 1e-8);
            assert!(p.schur_bound[i] >= p.lower_bound[i] - 1e-9);
        }
    }
}

#[test]
fn thouless_free_and_constant() {
    let s = Spectrum::from_word(&free()).unwrap();
    let p = s.dos_profile(4096);
    for z in [c(1.0, 0.0), Complex64::from_polar(1.0, 2.0), c(2.0, 0.0), c(0.3, 0.2)] {
        let r = thouless_check(&s, z, &p).unwrap();
        assert!(r.abs() < 1e-9, "{z}: {r}");
    }
    let s = Spectrum::from_word(&half()).unwrap();
    let p = s.dos_profile(1 << 14);
    for z in [
        Complex64::from_polar(1.0, 0.3),
        Complex64::from_polar(1.0, 2.0),
        Complex64::from_polar(1.0, PI),
        c(1.5, 0.5),
        c(0.2, -0.4),
    ] {
        let r = thouless_check(&s, z, &p).unwrap();
        assert!(r.abs() < 1e-4, "{z}: {r}");
    }
}

#[test]
fn craig_simon_free() {
    let s = Spectrum::from_word(&free()).unwrap();
    assert!((craig_simon_constant(&s) - 2f64.ln()).abs() < 1e-15);
    let arcs: Vec<Arc> = (1..40)
        .map(|i| Arc::new(0.1 * i as f64, 0.1 * i as f64 + 0.012 * i as f64))
        .collect();
    assert!(craig_simon_check(&s, &arcs).unwrap() > 0.0);
    assert!(matches!(
        craig_simon_check(&s, &[Arc::new(0.0, 0.6)]),
        Err(crate::Error::ArcTooLong(_))
    ));
}

#[test]
fn csv_headers() {
    let s = Spectrum::from_word(&half()).unwrap();
    let b = bands_csv(s.bands());
    assert!(b.starts_with("tau_left,tau_right\n"));
    let line = b.lines().nth(1).unwrap();
    let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(v[0], s.bands().bands[0].left);
    assert!(dos_csv(&s.dos_profile(8)).starts_with("tau,density,lower_bound,schur_bound\n"));
    assert!(thouless_csv(&[(c(1.0, 0.0), 0.0)]).starts_with("z_re,z_im,residual\n"));
}
