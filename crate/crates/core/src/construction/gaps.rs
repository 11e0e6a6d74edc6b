use serde::Serialize;

use crate::cmv::VerblunskyWord;
use crate::error::{Error, Result};
use crate::spectral::{band_list_of, BandList, EDGE_TOL};
use crate::transfer::{CompiledWord, MonodromySource};

/// Grid cells per unit of period used by the construction. Level counting
/// finds every band regardless of grid spacing, so a coarse grid suffices.
pub const CONSTRUCTION_GRID_PER_Q: usize = 16;

/// Number of halvings tried by [`open_gaps`].
const LADDER_STEPS: usize = 16;

/// Outcome of [`open_gaps`].
#[derive(Debug, Clone, Serialize)]
pub struct GapOpenResult {
    #[serde(skip)]
    pub word: VerblunskyWord,
    /// Size `delta` of the accepted rung; zero when no perturbation was needed.
    pub epsilon: f64,
    /// Sign of the accepted perturbation.
    pub sign: f64,
    pub band_count: usize,
    /// Smallest gap length.
    pub min_gap: f64,
    #[serde(skip)]
    pub bands: BandList,
}

pub(crate) fn bands_of(word: &VerblunskyWord) -> Result<BandList> {
    let c = CompiledWord::new(word);
    band_list_of(&c, CONSTRUCTION_GRID_PER_Q * c.period(), EDGE_TOL)
}

fn min_gap(bands: &BandList) -> f64 {
    bands.gaps.iter().map(|g| g.length()).fold(f64::INFINITY, f64::min)
}

/// Weight of the odd site `j` in the gap-opening perturbation: a ramp in `(0, 1]`.
fn ramp(j: usize, q: usize) -> f64 {
    (j + 1) as f64 / q as f64
}

/// Opens every gap by perturbing the odd-index phases.
///
/// Tries `lambda_j = mu_j e^{i s delta w_j}` for `delta = eps, eps/2, ...` and
/// `s = +1, -1`, where `w_j` ramps linearly from `2/q` to `1` over the odd
/// sites (a uniform rotation of all odd phases only rotates the spectrum). The
/// first candidate whose band list shows `q` open gaps wins; `alpha` and the
/// even phases are untouched and `|lambda_j - mu_j| <= delta <= eps`.
pub fn open_gaps(word: &VerblunskyWord, eps: f64) -> Result<GapOpenResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gap-opening budget must be positive, got {eps}"
        )));
    }
    let q = word.q();
    let bands = bands_of(word)?;
    if bands.gaps.len() == q {
        return Ok(GapOpenResult {
            word: word.clone(),
            epsilon: 0.0,
            sign: 1.0,
            band_count: q,
            min_gap: min_gap(&bands),
            bands,
        });
    }
    let base: Vec<f64> = word.pairs().iter().map(|p| p.lambda_arg()).collect();
    let mut last = bands;
    for step in 0..LADDER_STEPS {
        let delta = eps / (1u64 << step) as f64;
        for sign in [1.0, -1.0] {
            let mut args = base.clone();
            for j in (1..q).step_by(2) {
                args[j] += sign * delta * ramp(j, q);
            }
            let candidate = word.with_lambda_args(&args)?;
            let bands = bands_of(&candidate)?;
            if bands.gaps.len() == q {
                return Ok(GapOpenResult {
                    word: candidate,
                    epsilon: delta,
                    sign,
                    band_count: q,
                    min_gap: min_gap(&bands),
                    bands,
                });
            }
            last = bands;
        }
    }
    // Report the touch point of the last candidate that is furthest from opening.
    let c = CompiledWord::new(word);
    let (tau, excess) = last
        .touch_points
        .iter()
        .map(|&t| (t, c.circle(t, false, false).discriminant().abs() - 2.0))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((f64::NAN, f64::NAN));
    Err(Error::GapOpeningFailed { tau, excess })
}

/// Multiplies the phase at every even index by `e^{i phi}`, which multiplies
/// the operator (and rotates its spectrum) by `e^{i phi}`.
pub fn rotate_spectrum(word: &VerblunskyWord, phi: f64) -> VerblunskyWord {
    let args: Vec<f64> = word
        .pairs()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            if j % 2 == 0 {
                p.lambda_arg() + phi
            } else {
                p.lambda_arg()
            }
        })
        .collect();
    word.with_lambda_args(&args).expect("same period and alpha")
}
