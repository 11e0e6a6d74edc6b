use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su11::DiskPoint;

/// Default bound on `|alpha|` when a word file omits `r`.
pub const DEFAULT_R: f64 = 0.99;

/// One coefficient pair `(alpha_n, lambda_n)` with `lambda_n = e^{i lambda_arg}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerblunskyPair {
    alpha: DiskPoint,
    lambda_arg: f64,
}

impl VerblunskyPair {
    pub fn new(alpha: Complex64, lambda_arg: f64) -> Result<Self> {
        if !lambda_arg.is_finite() {
            return Err(Error::InvalidWord(format!("non-finite lambda_arg {lambda_arg}")));
        }
        Ok(Self {
            alpha: DiskPoint::new(alpha)?,
            lambda_arg,
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha.value()
    }

    pub fn lambda_arg(&self) -> f64 {
        self.lambda_arg
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.lambda_arg)
    }

    /// `rho = sqrt(1 - |alpha|^2)`.
    pub fn rho(&self) -> f64 {
        (1.0 - self.alpha().norm_sqr()).sqrt()
    }

    pub fn with_lambda_arg(&self, lambda_arg: f64) -> Self {
        Self {
            alpha: self.alpha,
            lambda_arg,
        }
    }
}

/// A periodic coefficient word of even period `q` with `max |alpha_n| <= r`.
///
/// Position `n` of the two-sided sequence reads `pairs[n mod q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskyWord {
    pairs: Vec<VerblunskyPair>,
    r: f64,
}

impl VerblunskyWord {
    pub fn new(pairs: Vec<VerblunskyPair>, r: f64) -> Result<Self> {
        if pairs.is_empty() || !pairs.len().is_multiple_of(2) {
            return Err(Error::InvalidWord(format!(
                "period must be positive and even, got {}",
                pairs.len()
            )));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidWord(format!("bound r = {r} is not in (0, 1)")));
        }
        if let Some((n, p)) = pairs.iter().enumerate().find(|(_, p)| p.alpha().norm() > r) {
            return Err(Error::InvalidWord(format!(
                "|alpha_{n}| = {} exceeds r = {r}",
                p.alpha().norm()
            )));
        }
        Ok(Self { pairs, r })
    }

    /// Builds a word from `(alpha, lambda_arg)` tuples.
    pub fn from_parts(parts: &[(Complex64, f64)], r: f64) -> Result<Self> {
        let pairs = parts
            .iter()
            .map(|&(a, l)| VerblunskyPair::new(a, l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs, r)
    }

    /// `alpha = 0`, `lambda = 1` at every site.
    pub fn free(q: usize) -> Result<Self> {
        Self::constant(q, Complex64::new(0.0, 0.0), 0.0)
    }

    /// The same pair repeated `q` times.
    pub fn constant(q: usize, alpha: Complex64, lambda_arg: f64) -> Result<Self> {
        let p = VerblunskyPair::new(alpha, lambda_arg)?;
        Self::new(vec![p; q], DEFAULT_R.max(alpha.norm()).min(1.0 - f64::EPSILON))
    }

    pub fn q(&self) -> usize {
        self.pairs.len()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn pairs(&self) -> &[VerblunskyPair] {
        &self.pairs
    }

    #[inline]
    pub fn pair(&self, n: i64) -> &VerblunskyPair {
        &self.pairs[n.rem_euclid(self.pairs.len() as i64) as usize]
    }

    #[inline]
    pub fn alpha(&self, n: i64) -> Complex64 {
        self.pair(n).alpha()
    }

    #[inline]
    pub fn lambda(&self, n: i64) -> Complex64 {
        self.pair(n).lambda()
    }

    pub fn max_alpha(&self) -> f64 {
        self.pairs.iter().map(|p| p.alpha().norm()).fold(0.0, f64::max)
    }

    /// The same two-sided sequence viewed with period `k q`.
    pub fn repeat(&self, k: usize) -> Result<Self> {
        let mut pairs = Vec::with_capacity(self.q() * k);
        for _ in 0..k {
            pairs.extend_from_slice(&self.pairs);
        }
        Self::new(pairs, self.r)
    }

    /// Replaces the phases; `args.len()` must equal `q`.
    pub fn with_lambda_args(&self, args: &[f64]) -> Result<Self> {
        if args.len() != self.q() {
            return Err(Error::InvalidWord("phase vector length differs from q".into()));
        }
        let pairs = self
            .pairs
            .iter()
            .zip(args)
            .map(|(p, &a)| p.with_lambda_arg(a))
            .collect();
        Self::new(pairs, self.r)
    }

    /// Coefficient-wise sup distance `max_n (|alpha_n - alpha'_n| + |lambda_n - lambda'_n|)`
    /// over a common period.
    pub fn distance(&self, other: &VerblunskyWord) -> f64 {
        let l = lcm(self.q(), other.q()) as i64;
        (0..l)
            .map(|n| (self.alpha(n) - other.alpha(n)).norm() + (self.lambda(n) - other.lambda(n)).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&WordFile::from(self)).expect("word serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WordFile = serde_json::from_str(text).map_err(|e| Error::InvalidWord(e.to_string()))?;
        file.try_into()
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// On-disk form: `{"q": int, "r": float, "pairs": [{"alpha": [re, im], "lambda_arg": float}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WordFile {
    pub q: usize,
    #[serde(default = "default_r")]
    pub r: f64,
    pub pairs: Vec<PairFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairFile {
    pub alpha: [f64; 2],
    pub lambda_arg: f64,
}

fn default_r() -> f64 {
    DEFAULT_R
}

impl From<&VerblunskyWord> for WordFile {
    fn from(w: &VerblunskyWord) -> Self {
        Self {
            q: w.q(),
            r: w.r(),
            pairs: w
                .pairs()
                .iter()
                .map(|p| PairFile {
                    alpha: [p.alpha().re, p.alpha().im],
                    lambda_arg: p.lambda_arg(),
                })
                .collect(),
        }
    }
}

impl TryFrom<WordFile> for VerblunskyWord {
    type Error = Error;

    fn try_from(f: WordFile) -> Result<Self> {
        if f.q != f.pairs.len() {
            return Err(Error::InvalidWord(format!(
                "q = {} but {} pairs given",
                f.q,
                f.pairs.len()
            )));
        }
        let parts: Vec<_> = f
            .pairs
            .iter()
            .map(|p| (Complex64::new(p.alpha[0], p.alpha[1]), p.lambda_arg))
            .collect();
        VerblunskyWord::from_parts(&parts, f.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_words() {
        let p = VerblunskyPair::new(Complex64::new(0.1, 0.0), 0.0).unwrap();
        assert!(VerblunskyWord::new(vec![p; 3], 0.9).is_err());
        assert!(VerblunskyWord::new(vec![], 0.9).is_err());
        assert!(VerblunskyWord::new(vec![p; 2], 0.05).is_err());
        assert!(VerblunskyWord::new(vec![p; 2], 1.0).is_err());
        assert!(VerblunskyPair::new(Complex64::new(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn two_sided_indexing() {
        let w = VerblunskyWord::from_parts(&[(Complex64::new(0.1, 0.0), 0.0), (Complex64::new(0.2, 0.0), 1.0)], 0.9)
            .unwrap();
        assert_eq!(w.alpha(-1).re, 0.2);
        assert_eq!(w.alpha(-2).re, 0.1);
        assert_eq!(w.alpha(7).re, 0.2);
    }

    #[test]
    fn json_shape() {
        let w = VerblunskyWord::constant(2, Complex64::new(0.5, 0.0), 0.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&w.to_json()).unwrap();
        assert_eq!(v["q"], 2);
        assert_eq!(v["pairs"][0]["alpha"][0], 0.5);
        assert!(VerblunskyWord::from_json(r#"{"q":4,"pairs":[]}"#).is_err());
        let d = VerblunskyWord::from_json(
            r#"{"q":2,"pairs":[{"alpha":[0,0],"lambda_arg":0},{"alpha":[0,0],"lambda_arg":0}]}"#,
        )
        .unwrap();
        assert_eq!(d.r(), DEFAULT_R);
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(
            vals in prop::collection::vec((-0.6f64..0.6, -0.6f64..0.6, -10.0f64..10.0), 1..6)
        ) {
            let parts: Vec<_> = vals
                .iter()
                .flat_map(|&(a, b, l)| [(Complex64::new(a, b), l), (Complex64::new(b, a), -l)])
                .collect();
            let w = VerblunskyWord::from_parts(&parts, 0.9).unwrap();
            let back = VerblunskyWord::from_json(&w.to_json()).unwrap();
            for (x, y) in w.pairs().iter().zip(back.pairs()) {
                prop_assert_eq!(x.alpha().re.to_bits(), y.alpha().re.to_bits());
                prop_assert_eq!(x.alpha().im.to_bits(), y.alpha().im.to_bits());
                prop_assert_eq!(x.lambda_arg().to_bits(), y.lambda_arg().to_bits());
            }
            prop_assert_eq!(w.r().to_bits(), back.r().to_bits());
        }
    }
}
