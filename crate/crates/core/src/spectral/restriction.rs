use std::f64::consts::TAU;

use super::dos::Spectrum;
use crate::error::{Error, Result};
use crate::su11::Mat2C;
use crate::transfer::{monodromy, SpectralParameter};

/// Points closer than this are one eigenvalue of the periodic restriction.
const MERGE_TOL: f64 = 1e-9;

impl Spectrum {
    /// Eigenvalue angles of the restriction to `n` periods with periodic
    /// boundary conditions, as a sorted multiset of `n q` angles in `[0, 2 pi)`.
    ///
    /// Each band unit meets every level `Delta = 2 cos(2 pi j/n)` once. For
    /// `0 < j < n/2` the eigenvalue is double; at `Delta = +-2` the
    /// multiplicity is the dimension of the eigenspace of `Phi` for `+-1`.
    pub fn periodic_restriction_spectrum(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let q = self.q();
        let mut points = Vec::with_capacity(n * q);
        for j in 0..=n / 2 {
            let theta = TAU * j as f64 / n as f64;
            let endpoint = j == 0 || 2 * j == n;
            let mut roots = Vec::with_capacity(q);
            for unit in &self.bands().units {
                // Delta = 2 cos(s/2) on the unit when it starts at Delta = 2,
                // and -2 cos(s/2) when it starts at Delta = -2.
                let starts_high = self.discriminant(unit.arc.left) > 0.0;
                let s = if starts_high { 2.0 * theta } else { TAU - 2.0 * theta };
                let s = s.clamp(0.0, TAU);
                let t = if s == 0.0 {
                    unit.arc.left
                } else if s == TAU {
                    unit.arc.right
                } else {
                    self.tau_at_rotation(unit, s)
                };
                roots.push(t.rem_euclid(TAU));
            }
            if !endpoint {
                for &t in &roots {
                    points.push(t);
                    points.push(t);
                }
                continue;
            }
            // Merge coincident edges of adjacent units, then count by eigenspace dimension.
            roots.sort_by(f64::total_cmp);
            let mut merged: Vec<(f64, usize)> = Vec::new();
            for &t in &roots {
                match merged.last_mut() {
                    Some((m, c)) if circ_dist(*m, t) < MERGE_TOL => *c += 1,
                    _ => merged.push((t, 1)),
                }
            }
            if merged.len() > 1 {
                let (first, last) = (merged[0], merged[merged.len() - 1]);
                if circ_dist(first.0, last.0) < MERGE_TOL {
                    merged[0].1 += last.1;
                    merged.pop();
                }
            }
            let sign = theta.cos().signum();
            for &(t, count) in &merged {
                let dim = eigenspace_dimension(&self.word_monodromy(t)?, sign);
                if dim != count {
                    return Err(Error::RootBracketFailure {
                        level: 2.0 * theta.cos(),
                        detail: format!("at tau = {t}: {count} band edges meet but the eigenspace has dimension {dim}"),
                    });
                }
                for _ in 0..dim {
                    points.push(t);
                }
            }
        }
        if points.len() != n * q {
            return Err(Error::RootBracketFailure {
                level: f64::NAN,
                detail: format!("found {} eigenvalues, expected {}", points.len(), n * q),
            });
        }
        points.sort_by(f64::total_cmp);
        Ok(points)
    }

    fn word_monodromy(&self, tau: f64) -> Result<Mat2C> {
        monodromy(self.word(), SpectralParameter::on_circle(tau))
    }
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Dimension of `ker(Phi - sign I)` for `Phi` with `tr Phi = 2 sign`:
/// two when `Phi = sign I`, else one.
fn eigenspace_dimension(phi: &Mat2C, sign: f64) -> usize {
    let id = Mat2C::identity().scale_re(sign);
    let scale = phi.max_abs().max(1.0);
    if phi.dist_inf(&id) <= 1e-7 * scale {
        2
    } else {
        1
    }
}

/// Sup distance between the empirical distribution of `points` (angles in
/// `[0, 2 pi)`) and a reference cumulative function on `[0, 2 pi]`.
pub fn empirical_cdf_distance(points: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = points.len() as f64;
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut worst: f64 = 0.0;
    for (i, &t) in sorted.iter().enumerate() {
        let f = cdf(t);
        worst = worst.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    worst
}
