use serde::Serialize;

use super::{step, step_adjoint, CoinSequence, WalkState};

/// Finite-horizon transport series of one initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RageReport {
    pub j: i64,
    pub horizon: usize,
    /// `p_n = sum_{|m| <= J} |psi_n(m)|^2` for `n = -N..=N`, both spins at each site.
    pub survival: Vec<f64>,
    /// `(1/(2M+1)) sum_{|n| <= M} p_n` for `M = 0..=N`.
    pub cesaro: Vec<f64>,
    /// `(1/(2M+1)) sum_{|n| <= M} |<psi_0, U^n psi_0>|^2` for `M = 0..=N`.
    pub wiener: Vec<f64>,
}

impl RageReport {
    /// `p_n` for `-N <= n <= N`.
    pub fn survival_at(&self, n: i64) -> f64 {
        self.survival[(n + self.horizon as i64) as usize]
    }

    /// Least-squares slope of `ln cesaro(M)` against `ln M` over powers of
    /// two `M` in `[lo, hi]`; `None` with fewer than two points or a zero value.
    pub fn cesaro_slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = (0..usize::BITS)
            .map(|k| 1usize << k)
            .filter(|&m| m >= lo && m <= hi.min(self.horizon))
            .map(|m| ((m as f64).ln(), self.cesaro[m].ln()))
            .collect();
        if pts.len() < 2 || pts.iter().any(|p| !p.1.is_finite()) {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

fn local_mass(s: &WalkState, j: i64) -> f64 {
    (-j..=j).map(|m| s.site_probability(m)).sum::<f64>().min(1.0)
}

/// Survival, Cesaro and Wiener series up to horizon `n`, with negative times
/// evolved by the adjoint.
pub fn rage_diagnostics(coins: &CoinSequence, psi0: &WalkState, j: i64, n: usize) -> RageReport {
    let mut survival = vec![0.0; 2 * n + 1];
    let mut overlap = vec![0.0; 2 * n + 1];
    let record = |s: &WalkState, t: i64, survival: &mut [f64], overlap: &mut [f64]| {
        let i = (t + n as i64) as usize;
        survival[i] = local_mass(s, j);
        overlap[i] = psi0.inner(s).norm_sqr().min(1.0);
    };
    record(psi0, 0, &mut survival, &mut overlap);
    let (mut fwd, mut bwd) = (psi0.clone(), psi0.clone());
    for t in 1..=n as i64 {
        fwd = step(&fwd, coins);
        bwd = step_adjoint(&bwd, coins);
        record(&fwd, t, &mut survival, &mut overlap);
        record(&bwd, -t, &mut survival, &mut overlap);
    }
    let averages = |series: &[f64]| {
        let mut out = Vec::with_capacity(n + 1);
        let mut sum = series[n];
        out.push(sum);
        for m in 1..=n {
            sum += series[n + m] + series[n - m];
            out.push(sum / (2 * m + 1) as f64);
        }
        out
    };
    RageReport {
        j,
        horizon: n,
        cesaro: averages(&survival),
        wiener: averages(&overlap),
        survival,
    }
}
