//! Coefficient words, the phased CMV operator `E = L M`, gauge transformation
//! to standard form, and the Gordon-condition diagnostic.

mod gauge;
mod operator;
mod word;

pub use gauge::{gauge_to_standard, GaugedWord};
pub use operator::{apply_operator, assemble_window, operator_entry, theta_block, OperatorWindow, WindowVector};
#[allow(unused_imports)]
pub(crate) use word::lcm;
pub use word::{PairFile, VerblunskyPair, VerblunskyWord, WordFile, DEFAULT_R};

use serde::Serialize;

/// Gordon defects `C^{q_k} max_{-q_k < n <= q_k} (|alpha_n - alpha_{n+q_k}| + |lambda_n - lambda_{n+q_k}|)`
/// of a limit word at the scales `q_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GordonReport {
    pub scales: Vec<usize>,
    pub constants: Vec<f64>,
    /// `defects[i][k]` belongs to `constants[i]` and `scales[k]`.
    pub defects: Vec<Vec<f64>>,
}

impl GordonReport {
    /// True when, for every constant, the defects decrease along the scales.
    pub fn decreasing(&self) -> bool {
        self.defects.iter().all(|row| row.windows(2).all(|w| w[1] <= w[0]))
    }
}

/// The raw discrepancy `max_{-q+1 <= n <= q} (|alpha_n - alpha_{n+q}| + |lambda_n - lambda_{n+q}|)`.
pub fn gordon_discrepancy(word: &VerblunskyWord, q: usize) -> f64 {
    let q = q as i64;
    (-q + 1..=q)
        .map(|n| (word.alpha(n) - word.alpha(n + q)).norm() + (word.lambda(n) - word.lambda(n + q)).norm())
        .fold(0.0, f64::max)
}

/// Evaluates the Gordon defects of the last word of `tower` (the best available
/// approximation of the limit) at the periods of every word in the tower.
pub fn gordon_check(tower: &[VerblunskyWord], constants: &[f64]) -> GordonReport {
    let scales: Vec<usize> = tower.iter().map(|w| w.q()).collect();
    let defects = match tower.last() {
        None => vec![Vec::new(); constants.len()],
        Some(limit) => {
            let raw: Vec<f64> = scales.iter().map(|&q| gordon_discrepancy(limit, q)).collect();
            constants
                .iter()
                .map(|&c| {
                    raw.iter()
                        .zip(&scales)
                        .map(|(&d, &q)| {
                            if d == 0.0 {
                                0.0
                            } else {
                                (q as f64 * c.ln() + d.ln()).exp()
                            }
                        })
                        .collect()
                })
                .collect()
        }
    };
    GordonReport {
        scales,
        constants: constants.to_vec(),
        defects,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn periodic_word_has_zero_defect() {
        let w = VerblunskyWord::from_parts(
            &[(Complex64::new(0.3, 0.1), 0.2), (Complex64::new(-0.2, 0.0), 1.0)],
            0.9,
        )
        .unwrap();
        let r = gordon_check(std::slice::from_ref(&w), &[2.0, 10.0]);
        assert_eq!(r.defects, vec![vec![0.0], vec![0.0]]);
    }

    #[test]
    fn single_scale_matches_formula() {
        let base = VerblunskyWord::from_parts(&[(Complex64::new(0.3, 0.0), 0.0), (Complex64::new(0.1, 0.0), 0.0)], 0.9)
            .unwrap();
        let mut parts: Vec<_> = (0..4).map(|n| (base.alpha(n), 0.0)).collect();
        parts[3].0 = Complex64::new(0.15, 0.0);
        let limit = VerblunskyWord::from_parts(&parts, 0.9).unwrap();
        let r = gordon_check(&[base, limit.clone()], &[3.0]);
        let direct = 9.0 * gordon_discrepancy(&limit, 2);
        assert!((r.defects[0][0] - direct).abs() < 1e-15);
        assert!((direct - 9.0 * 0.05).abs() < 1e-12);
        assert_eq!(r.defects[0][1], 0.0);
        assert!(r.decreasing());
    }
}
