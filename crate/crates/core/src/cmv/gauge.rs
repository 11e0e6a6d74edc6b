use num_complex::Complex64;

use super::word::{VerblunskyPair, VerblunskyWord};
use crate::error::Result;

/// The standard CMV coefficients `alpha'` of a phased word, obtained by the
/// diagonal gauge `Gamma delta_n = gamma_n delta_n` with `gamma_0 = gamma_1 = 1`.
///
/// Over one period the gauge multiplies `alpha'` by `conj(Lambda)^2`, where
/// `Lambda` is the product of all phases in the period, so `alpha'` is stored
/// as one period of data plus that drift.
#[derive(Debug, Clone)]
pub struct GaugedWord {
    word: VerblunskyWord,
    gamma: Vec<Complex64>,
    lambda_total_arg: f64,
    periodic: Option<usize>,
}

/// Distance of `e^{i x}` from 1 below which a phase counts as trivial.
const PHASE_TOL: f64 = 1e-12;

fn phase_is_one(x: f64) -> bool {
    (Complex64::from_polar(1.0, x) - 1.0).norm() < PHASE_TOL
}

impl GaugedWord {
    /// `gamma_n` for any integer `n`.
    pub fn gamma(&self, n: i64) -> Complex64 {
        let q = self.word.q() as i64;
        let k = n.div_euclid(q);
        let r = n.rem_euclid(q) as usize;
        let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.gamma[r] * Complex64::from_polar(1.0, sign * k as f64 * self.lambda_total_arg)
    }

    /// `alpha'_n` for any integer `n`.
    pub fn alpha(&self, n: i64) -> Complex64 {
        let w = &self.word;
        if n.rem_euclid(2) == 1 {
            let m = (n + 1) / 2;
            let l = w.lambda(2 * m) * w.lambda(2 * m - 1);
            l * self.gamma(2 * m + 1) * self.gamma(2 * m).conj() * w.alpha(n)
        } else {
            let m = n / 2;
            let l = w.lambda(2 * m) * w.lambda(2 * m - 1) * self.gamma(2 * m);
            l.conj() * self.gamma(2 * m - 1) * w.alpha(n)
        }
    }

    /// `Some(q)` or `Some(2q)` when `alpha'` repeats with that period, else `None`.
    pub fn periodic_period(&self) -> Option<usize> {
        self.periodic
    }

    /// The gauged word with all phases 1, when it is periodic.
    pub fn to_word(&self) -> Option<Result<VerblunskyWord>> {
        let p = self.periodic? as i64;
        let pairs = (0..p)
            .map(|n| VerblunskyPair::new(self.alpha(n), 0.0))
            .collect::<Result<Vec<_>>>();
        Some(pairs.and_then(|pairs| VerblunskyWord::new(pairs, self.word.r())))
    }

    pub fn source(&self) -> &VerblunskyWord {
        &self.word
    }
}

/// Gauges a phased word to standard CMV form (all phases 1).
pub fn gauge_to_standard(word: &VerblunskyWord) -> GaugedWord {
    let q = word.q();
    let mut gamma = vec![Complex64::new(1.0, 0.0); q];
    for n in (2..q).step_by(2) {
        let m = n as i64 - 2;
        gamma[n] = word.lambda(m + 1) * word.lambda(m) * gamma[n - 2];
    }
    for n in (3..q).step_by(2) {
        let m = (n as i64 - 1) / 2;
        gamma[n] = (word.lambda(2 * m) * word.lambda(2 * m - 1)).conj() * gamma[n - 2];
    }
    let lambda_total_arg: f64 = word.pairs().iter().map(|p| p.lambda_arg()).sum();
    let drift = -2.0 * lambda_total_arg;
    let all_zero = word.pairs().iter().all(|p| p.alpha() == Complex64::new(0.0, 0.0));
    let periodic = if all_zero || phase_is_one(drift) {
        Some(q)
    } else if phase_is_one(2.0 * drift) {
        Some(2 * q)
    } else {
        None
    };
    GaugedWord {
        word: word.clone(),
        gamma,
        lambda_total_arg,
        periodic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmv::operator::assemble_window;
    use crate::test_util::random_word;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Recursion from the definition, run outward from the origin.
    fn gamma_by_recursion(w: &VerblunskyWord, lo: i64, hi: i64) -> std::collections::HashMap<i64, Complex64> {
        let mut g = std::collections::HashMap::new();
        g.insert(0, c(1.0, 0.0));
        g.insert(1, c(1.0, 0.0));
        let mut n = 0;
        while 2 * n + 2 <= hi + 2 {
            let e = w.lambda(2 * n + 1) * w.lambda(2 * n) * g[&(2 * n)];
            g.insert(2 * n + 2, e);
            if n > 0 {
                let o = (w.lambda(2 * n) * w.lambda(2 * n - 1)).conj() * g[&(2 * n - 1)];
                g.insert(2 * n + 1, o);
            }
            n += 1;
        }
        let mut n = 0;
        while 2 * n - 2 >= lo - 2 {
            let e = g[&(2 * n)] / (w.lambda(2 * n - 1) * w.lambda(2 * n - 2));
            g.insert(2 * n - 2, e);
            let o = g[&(2 * n + 1)] / (w.lambda(2 * n) * w.lambda(2 * n - 1)).conj();
            g.insert(2 * n - 1, o);
            n -= 1;
        }
        g
    }

    #[test]
    fn trivial_phases_are_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = random_word(&mut rng, 4, 0.9);
        let w = w.with_lambda_args(&[0.0; 4]).unwrap();
        let g = gauge_to_standard(&w);
        for n in -9..9 {
            assert!((g.alpha(n) - w.alpha(n)).norm() < 1e-15);
        }
        assert_eq!(g.periodic_period(), Some(4));
    }

    #[test]
    fn single_phase_example() {
        let a = [c(0.1, 0.2), c(0.3, -0.1), c(-0.2, 0.05), c(0.4, 0.0)];
        let parts: Vec<_> = a
            .iter()
            .enumerate()
            .map(|(n, &x)| (x, if n == 0 { FRAC_PI_2 } else { 0.0 }))
            .collect();
        let w = VerblunskyWord::from_parts(&parts, 0.9).unwrap();
        let g = gauge_to_standard(&w);
        assert!((g.alpha(1) - c(0.0, -1.0) * a[1]).norm() < 1e-15);
    }

    #[test]
    fn closed_forms_for_positive_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = random_word(&mut rng, 6, 0.9);
        let g = gauge_to_standard(&w);
        for n in 1..10i64 {
            // alpha'_{2n-1} = conj(l_{2n-1} l_{2n-2}^2 ... l_1^2 l_0) alpha_{2n-1}, same shape for 2n.
            for top in [2 * n - 1, 2 * n] {
                let mut p = w.lambda(top) * w.lambda(0);
                for k in 1..top {
                    p *= w.lambda(k) * w.lambda(k);
                }
                assert!((g.alpha(top) - p.conj() * w.alpha(top)).norm() < 1e-13, "n = {top}");
            }
        }
    }

    #[test]
    fn gamma_matches_recursion_both_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = random_word(&mut rng, 4, 0.9);
        let g = gauge_to_standard(&w);
        let rec = gamma_by_recursion(&w, -14, 14);
        for n in -14..=14 {
            assert!((g.gamma(n) - rec[&n]).norm() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn conjugation_matches_standard_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for q in [2, 4, 6] {
            let w = random_word(&mut rng, q, 0.9);
            let g = gauge_to_standard(&w);
            let (lo, hi) = (-10i64, 10i64);
            let win = assemble_window(&w, lo, hi).unwrap();
            for m in lo..=hi {
                for n in lo..=hi {
                    let lhs = g.gamma(m) * win.entry(m, n) * g.gamma(n).conj();
                    let rhs = standard_entry(&g, m, n);
                    assert!((lhs - rhs).norm() < 1e-13, "({m}, {n})");
                }
            }
            for n in lo..=hi {
                assert!((g.alpha(n).norm() - w.alpha(n).norm()).abs() < 1e-15);
            }
        }
    }

    /// Entry of the standard CMV operator with coefficients `g.alpha`, built
    /// from an explicit two-sided word over a long stretch.
    fn standard_entry(g: &GaugedWord, m: i64, n: i64) -> Complex64 {
        use crate::cmv::operator::operator_entry;
        let base = m.min(n) - 4;
        // Shift by an even offset so block parity is kept.
        let off = base - base.rem_euclid(2);
        let parts: Vec<_> = (0..14).map(|k| (g.alpha(off + k), 0.0)).collect();
        let local = VerblunskyWord::from_parts(&parts, 0.99).unwrap();
        operator_entry(&local, m - off, n - off)
    }

    #[test]
    fn periodicity_detection() {
        let w = VerblunskyWord::from_parts(&[(c(0.2, 0.0), FRAC_PI_2), (c(0.3, 0.0), 0.0)], 0.9).unwrap();
        let g = gauge_to_standard(&w);
        // Lambda = i, drift conj(i)^2 = -1: period 2q.
        assert_eq!(g.periodic_period(), Some(4));
        let gw = g.to_word().unwrap().unwrap();
        for n in -8..8 {
            assert!((gw.alpha(n) - g.alpha(n)).norm() < 1e-14);
        }
        let w = VerblunskyWord::from_parts(&[(c(0.2, 0.0), 0.3), (c(0.3, 0.0), 0.0)], 0.9).unwrap();
        assert_eq!(gauge_to_standard(&w).periodic_period(), None);
    }
}
