use num_complex::Complex64;
use rand::Rng;

use crate::cmv::VerblunskyWord;

/// Random word of period `q` with `|alpha| <= rmax`, uniform in the disk, and
/// uniform phases.
pub fn random_word<R: Rng>(rng: &mut R, q: usize, rmax: f64) -> VerblunskyWord {
    let parts: Vec<_> = (0..q)
        .map(|_| {
            let r = rmax * rng.gen::<f64>().sqrt();
            let a = Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
            (a, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        })
        .collect();
    VerblunskyWord::from_parts(&parts, rmax.max(0.5)).unwrap()
}
