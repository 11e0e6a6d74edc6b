use num_complex::Complex64;

use super::word::{VerblunskyPair, VerblunskyWord};
use crate::error::{Error, Result};
use crate::su11::Mat2C;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `Theta(alpha, lambda) = lambda [[conj alpha, rho], [rho, -alpha]]`.
pub fn theta_block(pair: &VerblunskyPair) -> Mat2C {
    let a = pair.alpha();
    let rho = Complex64::new(pair.rho(), 0.0);
    Mat2C::new(a.conj(), rho, rho, -a).scale(pair.lambda())
}

/// Entry `<delta_m, X delta_n>` of the block-diagonal factor whose blocks start
/// at indices of parity `parity` (0 for L, 1 for M).
fn factor_entry(word: &VerblunskyWord, parity: i64, m: i64, n: i64) -> Complex64 {
    let start = if (m - parity).rem_euclid(2) == 0 { m } else { m - 1 };
    if n != start && n != start + 1 {
        return ZERO;
    }
    let t = theta_block(word.pair(start));
    match (m - start, n - start) {
        (0, 0) => t.a,
        (0, 1) => t.b,
        (1, 0) => t.c,
        _ => t.d,
    }
}

/// `<delta_m, E delta_n>` for the two-sided operator `E = L M`.
pub fn operator_entry(word: &VerblunskyWord, m: i64, n: i64) -> Complex64 {
    if (m - n).abs() > 2 {
        return ZERO;
    }
    let lstart = if m.rem_euclid(2) == 0 { m } else { m - 1 };
    (lstart..=lstart + 1)
        .map(|k| factor_entry(word, 0, m, k) * factor_entry(word, 1, k, n))
        .sum()
}

/// Rows `lo..=hi` of the two-sided operator restricted to columns `lo..=hi`.
///
/// Row `n` stores columns `n-2..=n+2`; columns outside the window read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorWindow {
    pub center_offset: i64,
    pub rows: Vec<[Complex64; 5]>,
}

impl OperatorWindow {
    pub fn lo(&self) -> i64 {
        self.center_offset
    }

    pub fn hi(&self) -> i64 {
        self.center_offset + self.rows.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Entry at absolute indices `(m, n)`.
    pub fn entry(&self, m: i64, n: i64) -> Complex64 {
        if m < self.lo() || m > self.hi() || n < self.lo() || n > self.hi() || (m - n).abs() > 2 {
            return ZERO;
        }
        self.rows[(m - self.lo()) as usize][(n - m + 2) as usize]
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let (lo, hi) = (self.lo(), self.hi());
        (lo..=hi)
            .map(|m| (lo..=hi).map(|n| self.entry(m, n)).collect())
            .collect()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (lo, hi) = (self.lo(), self.hi());
        (lo..=hi)
            .map(|m| {
                (m - 2..=m + 2)
                    .filter(|&n| n >= lo && n <= hi)
                    .map(|n| self.entry(m, n) * v[(n - lo) as usize])
                    .sum()
            })
            .collect()
    }
}

/// Restriction of `E = L M` to the index window `[lo, hi]`.
pub fn assemble_window(word: &VerblunskyWord, lo: i64, hi: i64) -> Result<OperatorWindow> {
    if hi - lo < 4 {
        return Err(Error::WindowTooSmall { lo, hi });
    }
    let rows = (lo..=hi)
        .map(|m| {
            let mut row = [ZERO; 5];
            for (k, n) in (m - 2..=m + 2).enumerate() {
                if n >= lo && n <= hi {
                    row[k] = operator_entry(word, m, n);
                }
            }
            row
        })
        .collect();
    Ok(OperatorWindow {
        center_offset: lo,
        rows,
    })
}

/// A vector on the index window `lo..lo + data.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowVector {
    pub lo: i64,
    pub data: Vec<Complex64>,
}

impl WindowVector {
    pub fn zeros(lo: i64, hi: i64) -> Self {
        Self {
            lo,
            data: vec![ZERO; (hi - lo + 1).max(0) as usize],
        }
    }

    /// `delta_n` on `[n - pad, n + pad]`.
    pub fn delta(n: i64, pad: i64) -> Self {
        let mut v = Self::zeros(n - pad, n + pad);
        v.data[pad as usize] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.data.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Complex64 {
        if n < self.lo || n > self.hi() {
            ZERO
        } else {
            self.data[(n - self.lo) as usize]
        }
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Extends the window by `k` zero sites on each side.
    pub fn padded(&self, k: usize) -> Self {
        let mut data = vec![ZERO; k];
        data.extend_from_slice(&self.data);
        data.extend(std::iter::repeat_n(ZERO, k));
        Self {
            lo: self.lo - k as i64,
            data,
        }
    }

    fn support_gap(&self) -> Option<(usize, usize)> {
        let first = self.data.iter().position(|z| *z != ZERO)?;
        let last = self.data.iter().rposition(|z| *z != ZERO)?;
        Some((first, self.data.len() - 1 - last))
    }
}

/// Applies one block-diagonal factor (`parity` 0 for L, 1 for M) in place,
/// optionally as its adjoint. Blocks straddling the window edge act only
/// through their in-window part, which is exact when the support keeps clear
/// of the edge.
fn apply_factor(word: &VerblunskyWord, parity: i64, v: &mut WindowVector, adjoint: bool) {
    let (lo, hi) = (v.lo, v.hi());
    let mut start = if (lo - parity).rem_euclid(2) == 0 { lo } else { lo - 1 };
    while start <= hi {
        let t = theta_block(word.pair(start));
        let t = if adjoint { t.adjoint() } else { t };
        let x = v.get(start);
        let y = v.get(start + 1);
        let [u, w] = t.apply([x, y]);
        if start >= lo {
            v.data[(start - lo) as usize] = u;
        }
        if start < hi {
            v.data[(start + 1 - lo) as usize] = w;
        }
        start += 2;
    }
}

/// `E psi` (or `E^* psi`). The support must keep two sites clear of the window
/// edges; with `auto_grow` the window is padded instead of failing.
pub fn apply_operator(
    word: &VerblunskyWord,
    psi: &WindowVector,
    adjoint: bool,
    auto_grow: bool,
) -> Result<WindowVector> {
    let mut v = match psi.support_gap() {
        None => return Ok(psi.clone()),
        Some((left, right)) if left < 2 || right < 2 => {
            if !auto_grow {
                return Err(Error::SupportTouchesBoundary);
            }
            psi.padded(2 - left.min(right).min(2))
        }
        Some(_) => psi.clone(),
    };
    if adjoint {
        apply_factor(word, 0, &mut v, true);
        apply_factor(word, 1, &mut v, true);
    } else {
        apply_factor(word, 1, &mut v, false);
        apply_factor(word, 0, &mut v, false);
    }
    Ok(v)
}
