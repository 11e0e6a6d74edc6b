use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::{Coin, CoinSequence};
use crate::cmv::VerblunskyWord;
use crate::error::{Error, Result};

/// `x` reduced to `(-pi, pi]`.
fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Phase of the odd-site `lambda` for a coin: the midpoint of the short arc
/// between `arg q11` and `arg q22`.
fn odd_phase(c: &Coin) -> f64 {
    let (a, d) = (c.q11.arg(), c.q22.arg());
    a + 0.5 * wrap(d - a)
}

/// Diagonal gauge relating a walk to its CMV word.
///
/// With basis vectors `phi_k` of the walk and `delta_k` of the operator,
/// `<phi_r, U phi_c> = e^{i (g_r - g_c)} <delta_{r+1}, E delta_{c+1}>`,
/// normalized by `g_0 = g_1 = 0`. Even phases advance by `drift[n]` across
/// position `n`; odd phases satisfy `g_{2n+1} = g_{2n+2} + offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkGauge {
    pub offset: f64,
    pub drift: Vec<f64>,
    /// Sum of `drift` over one period.
    pub period_drift: f64,
}

impl WalkGauge {
    fn even(&self, m: i64) -> f64 {
        let p = self.drift.len() as i64;
        let (k, r) = (m.div_euclid(p), m.rem_euclid(p) as usize);
        k as f64 * self.period_drift + self.drift[..r].iter().sum::<f64>()
    }

    /// `g_k`.
    pub fn phase(&self, k: i64) -> f64 {
        if k.rem_euclid(2) == 0 {
            self.even(k / 2)
        } else {
            self.even((k + 1) / 2) + self.offset
        }
    }
}

fn check_nondegenerate(coins: &CoinSequence) -> Result<()> {
    match coins.coins().iter().position(|c| c.is_degenerate()) {
        Some(n) => Err(Error::DegenerateCoin(n as i64)),
        None => Ok(()),
    }
}

/// The gauge of [`coins_to_cmv`].
pub fn walk_gauge(coins: &CoinSequence) -> Result<WalkGauge> {
    check_nondegenerate(coins)?;
    let drift: Vec<f64> = coins.coins().iter().map(|c| c.q11.arg() - odd_phase(c)).collect();
    let c0 = &coins.coins()[0];
    Ok(WalkGauge {
        offset: c0.q22.arg() - odd_phase(c0),
        period_drift: drift.iter().sum(),
        drift,
    })
}

/// The phased CMV word of a walk.
///
/// Position `n` becomes indices `2n` (with `alpha = 0`, `lambda = 1`) and
/// `2n + 1` (with `|alpha| = |q21|`). The walk matrix and the operator then
/// agree up to the diagonal gauge of [`walk_gauge`] and an index shift by one.
pub fn coins_to_cmv(coins: &CoinSequence) -> Result<VerblunskyWord> {
    let gauge = walk_gauge(coins)?;
    let mut parts = Vec::with_capacity(2 * coins.period());
    for c in coins.coins() {
        let l = odd_phase(c);
        let a = gauge.offset + l - c.q21.arg();
        parts.push((Complex64::new(0.0, 0.0), 0.0));
        parts.push((Complex64::from_polar(c.q21.norm(), a), wrap(l)));
    }
    let rmax = coins.coins().iter().map(|c| c.q21.norm()).fold(0.0, f64::max);
    VerblunskyWord::from_parts(&parts, crate::cmv::DEFAULT_R.max(rmax))
}

/// Coins whose walk matrix equals the operator of `word` (shifted by one
/// index) with trivial gauge. Needs every even-index `alpha` to vanish.
pub fn cmv_from_coins_inverse(word: &VerblunskyWord) -> Result<CoinSequence> {
    if let Some(j) = (0..word.q())
        .step_by(2)
        .find(|&j| word.alpha(j as i64) != Complex64::new(0.0, 0.0))
    {
        return Err(Error::NotWalkShaped(j));
    }
    let coins = (0..word.q() as i64 / 2)
        .map(|n| {
            let p = word.pair(2 * n + 1);
            let (a, rho) = (p.alpha(), Complex64::new(p.rho(), 0.0));
            let right = p.lambda() * word.lambda(2 * n + 2);
            let left = p.lambda() * word.lambda(2 * n);
            Coin::new(right * rho, -right * a, left * a.conj(), left * rho)
        })
        .collect();
    CoinSequence::new(coins)
}
