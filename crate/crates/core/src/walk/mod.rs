//! Coined quantum walks on the line: the update `U = S C`, its matrix in the
//! basis `phi_{2m} = delta_m^+`, `phi_{2m+1} = delta_m^-`, the correspondence
//! with phased CMV words whose even coefficients vanish, and RAGE-type
//! transport diagnostics.

mod correspondence;
mod rage;

pub use correspondence::{cmv_from_coins_inverse, coins_to_cmv, walk_gauge, WalkGauge};
pub use rage::{rage_diagnostics, RageReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entrywise defect of `Q* Q - I` accepted for a coin.
pub const UNITARY_TOL: f64 = 1e-10;

/// A `U(2)` coin `[[q11, q12], [q21, q22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coin {
    pub q11: Complex64,
    pub q12: Complex64,
    pub q21: Complex64,
    pub q22: Complex64,
}

impl Coin {
    pub const IDENTITY: Coin = Coin {
        q11: ONE,
        q12: ZERO,
        q21: ZERO,
        q22: ONE,
    };

    pub fn new(q11: Complex64, q12: Complex64, q21: Complex64, q22: Complex64) -> Self {
        Self { q11, q12, q21, q22 }
    }

    pub fn hadamard() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(s, s, s, -s)
    }

    /// Entrywise max of `|Q* Q - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let c = self;
        let d11 = c.q11.norm_sqr() + c.q21.norm_sqr() - 1.0;
        let d22 = c.q12.norm_sqr() + c.q22.norm_sqr() - 1.0;
        let d12 = (c.q11.conj() * c.q12 + c.q21.conj() * c.q22).norm();
        d11.abs().max(d22.abs()).max(d12)
    }

    /// Nondegenerate means `q11 != 0` and `q22 != 0`.
    pub fn is_degenerate(&self) -> bool {
        self.q11 == ZERO || self.q22 == ZERO
    }

    /// `Q^*`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.q11.conj(), self.q21.conj(), self.q12.conj(), self.q22.conj())
    }

    /// `Q (a, b)^T`.
    fn apply(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        (self.q11 * a + self.q12 * b, self.q21 * a + self.q22 * b)
    }
}

/// Periodic coins: position `n` uses `coins[n mod p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSequence {
    coins: Vec<Coin>,
}

impl CoinSequence {
    /// Checks that every coin is unitary within [`UNITARY_TOL`].
    pub fn new(coins: Vec<Coin>) -> Result<Self> {
        if coins.is_empty() {
            return Err(Error::InvalidArgument("coin period must be positive".into()));
        }
        if let Some(n) = coins.iter().position(|c| !(c.unitarity_defect() <= UNITARY_TOL)) {
            return Err(Error::NonUnitaryCoin(n as i64));
        }
        Ok(Self { coins })
    }

    pub fn constant(coin: Coin) -> Result<Self> {
        Self::new(vec![coin])
    }

    pub fn period(&self) -> usize {
        self.coins.len()
    }

    pub fn coins(&self) -> &[Coin] {
        &self.coins
    }

    pub fn at(&self, n: i64) -> &Coin {
        &self.coins[n.rem_euclid(self.coins.len() as i64) as usize]
    }

    pub fn to_file(&self) -> CoinFile {
        let e = |z: Complex64| [z.re, z.im];
        CoinFile {
            period: self.period(),
            coins: self
                .coins
                .iter()
                .map(|c| [e(c.q11), e(c.q12), e(c.q21), e(c.q22)])
                .collect(),
        }
    }

    pub fn from_file(file: &CoinFile) -> Result<Self> {
        if file.period != file.coins.len() {
            return Err(Error::InvalidArgument(format!(
                "period {} does not match {} coins",
                file.period,
                file.coins.len()
            )));
        }
        let z = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        Self::new(
            file.coins
                .iter()
                .map(|c| Coin::new(z(c[0]), z(c[1]), z(c[2]), z(c[3])))
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("coin file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CoinFile = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// On-disk coin format: entries `q11, q12, q21, q22` as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinFile {
    pub period: usize,
    pub coins: Vec<[[f64; 2]; 4]>,
}

/// Spin component of a basis vector `delta_n^{+/-}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Amplitudes `(psi_n^+, psi_n^-)` on positions `lo..lo + len`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    lo: i64,
    amps: Vec<[Complex64; 2]>,
    pub time: i64,
}

impl WalkState {
    /// `delta_n^{spin}` on the window `[n - 1, n + 1]`.
    pub fn basis(n: i64, spin: Spin) -> Self {
        let mut amps = vec![[ZERO; 2]; 3];
        amps[1][spin as usize] = ONE;
        Self {
            lo: n - 1,
            amps,
            time: 0,
        }
    }

    /// A state from amplitudes starting at position `lo`, padded by one empty
    /// site on each side.
    pub fn from_amplitudes(lo: i64, amps: &[[Complex64; 2]]) -> Self {
        let mut v = Vec::with_capacity(amps.len() + 2);
        v.push([ZERO; 2]);
        v.extend_from_slice(amps);
        v.push([ZERO; 2]);
        Self {
            lo: lo - 1,
            amps: v,
            time: 0,
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.amps.len() as i64 - 1
    }

    pub fn get(&self, n: i64, spin: Spin) -> Complex64 {
        if n < self.lo || n > self.hi() {
            return ZERO;
        }
        self.amps[(n - self.lo) as usize][spin as usize]
    }

    /// `|psi_n^+|^2 + |psi_n^-|^2`.
    pub fn site_probability(&self, n: i64) -> f64 {
        self.get(n, Spin::Up).norm_sqr() + self.get(n, Spin::Down).norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &WalkState) -> Complex64 {
        let (lo, hi) = (self.lo.max(other.lo), self.hi().min(other.hi()));
        (lo..=hi)
            .map(|n| {
                self.get(n, Spin::Up).conj() * other.get(n, Spin::Up)
                    + self.get(n, Spin::Down).conj() * other.get(n, Spin::Down)
            })
            .sum()
    }

    /// Amplitude on the ordered basis vector `phi_k`.
    pub fn phi(&self, k: i64) -> Complex64 {
        let spin = if k.rem_euclid(2) == 0 { Spin::Up } else { Spin::Down };
        self.get(k.div_euclid(2), spin)
    }
}

/// `U psi` with `U = S C`; the window grows by one site on each side.
pub fn step(state: &WalkState, coins: &CoinSequence) -> WalkState {
    let mut out = vec![[ZERO; 2]; state.amps.len() + 2];
    // Position n maps to index n - lo + 1 in the grown window.
    for (i, a) in state.amps.iter().enumerate() {
        let n = state.lo + i as i64;
        let (up, down) = coins.at(n).apply(a[0], a[1]);
        out[i + 2][0] += up;
        out[i][1] += down;
    }
    WalkState {
        lo: state.lo - 1,
        amps: out,
        time: state.time + 1,
    }
}

/// `U^* psi = C^* S^* psi`; the window grows by one site on each side.
pub fn step_adjoint(state: &WalkState, coins: &CoinSequence) -> WalkState {
    let (lo, hi) = (state.lo - 1, state.hi() + 1);
    let amps = (lo..=hi)
        .map(|n| {
            let (up, down) = coins
                .at(n)
                .adjoint()
                .apply(state.get(n + 1, Spin::Up), state.get(n - 1, Spin::Down));
            [up, down]
        })
        .collect();
    WalkState {
        lo,
        amps,
        time: state.time - 1,
    }
}

/// `U^n psi` for `n >= 0`, or `(U^*)^{-n} psi` for `n < 0`.
pub fn evolve(state: &WalkState, coins: &CoinSequence, n: i64) -> WalkState {
    let mut s = state.clone();
    for _ in 0..n.unsigned_abs() {
        s = if n > 0 {
            step(&s, coins)
        } else {
            step_adjoint(&s, coins)
        };
    }
    s
}

/// The update matrix on basis vectors `phi_{2 lo} ..= phi_{2 hi + 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateWindow {
    pub lo: i64,
    pub hi: i64,
    /// Dense rows indexed from `phi_{2 lo}`.
    pub rows: Vec<Vec<Complex64>>,
}

impl UpdateWindow {
    /// `<phi_r, U phi_c>` at absolute basis indices; zero outside the window.
    pub fn entry(&self, r: i64, c: i64) -> Complex64 {
        let (a, b) = (2 * self.lo, 2 * self.hi + 1);
        if r < a || r > b || c < a || c > b {
            return ZERO;
        }
        self.rows[(r - a) as usize][(c - a) as usize]
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// `<phi_r, U phi_c>` for the two-sided walk.
pub fn update_entry(coins: &CoinSequence, r: i64, c: i64) -> Complex64 {
    let n = c.div_euclid(2);
    let q = coins.at(n);
    let up = c.rem_euclid(2) == 0;
    if r == 2 * n + 2 {
        if up {
            q.q11
        } else {
            q.q12
        }
    } else if r == 2 * n - 1 {
        if up {
            q.q21
        } else {
            q.q22
        }
    } else {
        ZERO
    }
}

/// Restriction of `U` to positions `lo..=hi`.
pub fn update_matrix_window(coins: &CoinSequence, lo: i64, hi: i64) -> Result<UpdateWindow> {
    if hi - lo < 4 {
        return Err(Error::WindowTooSmall { lo, hi });
    }
    let (a, b) = (2 * lo, 2 * hi + 1);
    let rows = (a..=b)
        .map(|r| (a..=b).map(|c| update_entry(coins, r, c)).collect())
        .collect();
    Ok(UpdateWindow { lo, hi, rows })
}
