use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::gaps::{bands_of, rotate_spectrum};
use crate::cmv::VerblunskyWord;
use crate::error::{Error, Result};
use crate::spectral::{Arc, BandList};
use crate::su11::Mat2C;
use crate::transfer::{CircleEval, CompiledWord, Lifted, MonodromySource, ScaledMat};

/// Smallest certification grid.
const MIN_CERT_GRID: usize = 4096;
/// Upper limit on the certification grid after refinement.
const MAX_CERT_GRID: usize = 1 << 24;

/// Rotations `U_j = e^{i j gamma} E'` for `|j| <= k` of a word with all gaps open.
#[derive(Debug, Clone, Serialize)]
pub struct CoverFamily {
    #[serde(skip)]
    pub base: VerblunskyWord,
    #[serde(skip)]
    pub members: Vec<VerblunskyWord>,
    /// Rotation angle `j gamma` of each member.
    pub rotations: Vec<f64>,
    pub gamma: f64,
    pub k: usize,
    /// Period `q` of the seed; the base period is `n' q`.
    pub seed_period: usize,
    /// Grid size on which the empty joint spectrum was certified.
    pub certified_grid: usize,
    #[serde(skip)]
    pub base_bands: BandList,
}

impl CoverFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member period `n' q`.
    pub fn period(&self) -> usize {
        self.base.q()
    }

    /// `n' = period / seed period`.
    pub fn n_prime(&self) -> usize {
        self.period() / self.seed_period
    }

    /// Declares the seed period `q`; it must divide the member period.
    pub fn with_seed_period(mut self, q: usize) -> Result<Self> {
        if q == 0 || !q.is_multiple_of(2) || !self.period().is_multiple_of(q) {
            return Err(Error::InvalidArgument(format!(
                "seed period {q} does not divide the member period {}",
                self.period()
            )));
        }
        self.seed_period = q;
        Ok(self)
    }

    /// Bands of member `j` (index into `members`), translated from the base.
    pub fn member_bands(&self, j: usize) -> BandList {
        self.base_bands.shifted(self.rotations[j])
    }
}

/// Sorted band arcs with logarithmic membership tests.
pub(crate) struct SpectrumIndex {
    bands: Vec<Arc>,
}

impl SpectrumIndex {
    pub(crate) fn new(bands: &BandList) -> Self {
        let mut b = bands.bands.clone();
        b.sort_by(|x, y| x.left.total_cmp(&y.left));
        Self { bands: b }
    }

    pub(crate) fn contains(&self, tau: f64) -> bool {
        let t = tau.rem_euclid(TAU);
        let i = self.bands.partition_point(|a| a.left <= t);
        if i > 0 && self.bands[i - 1].right >= t {
            return true;
        }
        // A band wrapping through zero.
        self.bands.last().is_some_and(|a| a.right >= t + TAU)
    }
}

/// First grid point (if any) of an `n`-point grid lying in every member spectrum.
fn uncovered_point(index: &SpectrumIndex, rotations: &[f64], n: usize) -> Option<f64> {
    (0..n)
        .map(|i| TAU * i as f64 / n as f64)
        .find(|&t| rotations.iter().all(|&phi| index.contains(t - phi)))
}

/// The rotation family of the cover claim.
///
/// Needs all `q` gaps of `word` open and every band shorter than `delta/6`.
/// Sets `gamma = min(delta/6, gamma0/2)` with `gamma0` the shortest gap,
/// `k = ceil(delta/(6 gamma))`, and checks on a grid finer than `gamma0/4`
/// that every grid point is in the resolvent set of some member. A failed check
/// is retried once on a four times finer grid.
pub fn cover_family(word: &VerblunskyWord, delta: f64) -> Result<CoverFamily> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let q = word.q();
    let bands = bands_of(word)?;
    if bands.gaps.len() != q {
        return Err(Error::InvalidArgument(format!(
            "cover needs {q} open gaps, found {}",
            bands.gaps.len()
        )));
    }
    let widest = bands.bands.iter().map(|b| b.length()).fold(0.0, f64::max);
    if widest >= delta / 6.0 {
        return Err(Error::InvalidArgument(format!(
            "widest band {widest} is not below delta/6 = {}",
            delta / 6.0
        )));
    }
    let gamma0 = bands.gaps.iter().map(|g| g.length()).fold(f64::INFINITY, f64::min);
    let gamma = (delta / 6.0).min(gamma0 / 2.0);
    let k = (delta / (6.0 * gamma)).ceil() as usize;
    let rotations: Vec<f64> = (-(k as i64)..=k as i64).map(|j| j as f64 * gamma).collect();
    let members: Vec<VerblunskyWord> = rotations.iter().map(|&phi| rotate_spectrum(word, phi)).collect();
    for m in &members {
        let d = m.distance(word);
        if d > delta / 2.0 {
            return Err(Error::InvalidArgument(format!(
                "member at distance {d} exceeds delta/2"
            )));
        }
    }
    let index = SpectrumIndex::new(&bands);
    let mut grid = ((4.0 * TAU / gamma0).ceil() as usize).clamp(MIN_CERT_GRID, MAX_CERT_GRID / 4);
    let mut bad = uncovered_point(&index, &rotations, grid);
    if bad.is_some() {
        grid *= 4;
        bad = uncovered_point(&index, &rotations, grid);
    }
    if let Some(t) = bad {
        return Err(Error::CoverCertificationFailed(t));
    }
    Ok(CoverFamily {
        base: word.clone(),
        members,
        rotations,
        gamma,
        k,
        seed_period: q,
        certified_grid: grid,
        base_bands: bands,
    })
}

/// Block boundaries `s_0 = 0, s_j = j (n~ + 1) n' q` for `j < l`, `s_l = n q`,
/// with `n~` maximal subject to `l n' (n~ + 1) <= n`.
pub fn block_layout(ell: usize, n_prime: usize, q: usize, n: usize) -> Result<Vec<usize>> {
    let bound = 4 * ell * n_prime;
    if ell == 0 || n <= bound {
        return Err(Error::NTooSmall { n, bound });
    }
    let reps = n / (ell * n_prime);
    let mut s: Vec<usize> = (0..ell).map(|j| j * reps * n_prime * q).collect();
    s.push(n * q);
    Ok(s)
}

/// The `n q`-periodic word repeating each member over its block.
pub fn concatenate_cover(family: &CoverFamily, n: usize) -> Result<VerblunskyWord> {
    let s = block_layout(family.len(), family.n_prime(), family.seed_period, n)?;
    let mut pairs = Vec::with_capacity(n * family.seed_period);
    for (j, m) in family.members.iter().enumerate() {
        pairs.extend((s[j]..s[j + 1]).map(|i| *m.pair(i as i64)));
    }
    VerblunskyWord::new(pairs, family.base.r())
}

/// A monodromy and its `tau` derivative sharing one scale.
#[derive(Debug, Clone, Copy)]
struct Jet {
    m: Mat2C,
    d: Mat2C,
    log_scale: f64,
}

impl Jet {
    fn identity() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            m: Mat2C::identity(),
            d: Mat2C::new(z, z, z, z),
            log_scale: 0.0,
        }
    }

    /// `self * rhs` with `rhs` acting first.
    fn mul(&self, rhs: &Jet) -> Jet {
        let m = self.m * rhs.m;
        let d = self.m * rhs.d + self.d * rhs.m;
        let s = m.max_abs();
        let (m, d, log_scale) = if s > 0.0 && s.is_finite() {
            (
                m.scale_re(1.0 / s),
                d.scale_re(1.0 / s),
                self.log_scale + rhs.log_scale + s.ln(),
            )
        } else {
            (m, d, self.log_scale + rhs.log_scale)
        };
        Jet { m, d, log_scale }
    }

    fn pow(&self, mut n: u64) -> Jet {
        let mut result = Jet::identity();
        let mut base = *self;
        while n > 0 {
            if n & 1 == 1 {
                result = base.mul(&result);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

fn scaled_pow(m: &ScaledMat, mut n: u64) -> ScaledMat {
    let mut result = ScaledMat::identity();
    let mut base = *m;
    while n > 0 {
        if n & 1 == 1 {
            result = base.mul(&result);
        }
        n >>= 1;
        if n > 0 {
            base = base.mul(&base);
        }
    }
    result
}

/// A long periodic word stored as blocks `(member, repetitions)`.
///
/// The monodromy is the product of block powers, so one evaluation costs the
/// member periods plus logarithmically many products per block instead of the
/// full period.
#[derive(Debug, Clone)]
pub struct StructuredWord {
    blocks: Vec<(CompiledWord, u64)>,
    period: usize,
    log_rho_inf: f64,
}

impl StructuredWord {
    /// Blocks act in order: `blocks[0]` first.
    pub fn new(blocks: Vec<(VerblunskyWord, u64)>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|b| b.1 == 0) {
            return Err(Error::InvalidArgument("structured word needs nonempty blocks".into()));
        }
        let period: usize = blocks.iter().map(|(w, r)| w.q() * *r as usize).sum();
        let log_rho_inf = blocks
            .iter()
            .map(|(w, r)| {
                let c = CompiledWord::new(w);
                c.log_rho_inf() * (w.q() as f64 * *r as f64)
            })
            .sum::<f64>()
            / period as f64;
        Ok(Self {
            blocks: blocks.iter().map(|(w, r)| (CompiledWord::new(w), *r)).collect(),
            period,
            log_rho_inf,
        })
    }

    /// The concatenation of `family` at multiplier `n`, as blocks.
    pub fn from_cover(family: &CoverFamily, n: usize) -> Result<Self> {
        let s = block_layout(family.len(), family.n_prime(), family.seed_period, n)?;
        let p = family.period();
        let mut blocks = Vec::new();
        for (j, m) in family.members.iter().enumerate() {
            let len = s[j + 1] - s[j];
            let (full, tail) = (len / p, len % p);
            if full > 0 {
                blocks.push((m.clone(), full as u64));
            }
            if tail > 0 {
                let prefix = VerblunskyWord::new(m.pairs()[..tail].to_vec(), m.r())?;
                blocks.push((prefix, 1));
            }
        }
        Self::new(blocks)
    }
}

impl MonodromySource for StructuredWord {
    fn period(&self) -> usize {
        self.period
    }

    fn monodromy_at(&self, z: Complex64) -> ScaledMat {
        self.blocks.iter().fold(ScaledMat::identity(), |acc, (w, r)| {
            scaled_pow(&w.monodromy_at(z), *r).mul(&acc)
        })
    }

    fn circle(&self, tau: f64, derivative: bool, lift: bool) -> CircleEval {
        let mut mat = ScaledMat::identity();
        let mut jet = Jet::identity();
        let mut lifted = Lifted::identity();
        for (w, r) in &self.blocks {
            let e = w.circle(tau, derivative, lift);
            if lift {
                lifted = e.lifted().expect("lift requested").pow(*r).mul(&lifted);
            }
            if derivative {
                let j = Jet {
                    m: e.mat.m,
                    d: e.dm.expect("derivative requested"),
                    log_scale: e.mat.log_scale,
                };
                jet = j.pow(*r).mul(&jet);
            }
            if !lift && !derivative {
                mat = scaled_pow(&e.mat, *r).mul(&mat);
            }
        }
        if lift {
            mat = lifted.mat;
        } else if derivative {
            mat = ScaledMat {
                m: jet.m,
                log_scale: jet.log_scale,
            }
            .normalized();
        }
        let dm = derivative.then(|| jet.d.scale_re((jet.log_scale - mat.log_scale).exp()));
        CircleEval {
            mat,
            dm,
            psi: lift.then_some(lifted.psi),
        }
    }

    fn log_rho_inf(&self) -> f64 {
        self.log_rho_inf
    }
}
