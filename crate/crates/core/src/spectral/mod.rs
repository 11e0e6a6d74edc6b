//! Band structure, density of states, Schur-function bounds, periodic
//! restrictions, and the Thouless and Craig-Simon checks for periodic words.
//!
//! The rotation number of the lifted monodromy (see
//! [`crate::transfer::Lifted`]) is the backbone: it is constant on gaps,
//! climbs by `2 pi` across each band, and gives `nu` of any arc exactly as
//! `Delta R / (2 pi q)`.

mod bands;
mod checks;
mod dos;
mod restriction;

use std::fmt::Write as _;

use num_complex::Complex64;

pub use bands::{band_list_of, Arc, BandList, BandUnit};
pub(crate) use bands::{map_grid, rotation_at};
pub use checks::{craig_simon_check, craig_simon_constant, log_potential, thouless_check};
pub use dos::{DOSProfile, DosRoute, SchurSample, Spectrum, EDGE_TOL, GRID_PER_Q};
pub use restriction::empirical_cdf_distance;

use crate::cmv::VerblunskyWord;
use crate::error::Result;

pub fn band_list(word: &VerblunskyWord, grid_size: usize, edge_tol: f64) -> Result<BandList> {
    Ok(Spectrum::new(word, grid_size, edge_tol)?.bands().clone())
}

pub fn rotation_angle(word: &VerblunskyWord, tau: f64) -> Result<f64> {
    Spectrum::from_word(word)?.rotation_angle(tau)
}

pub fn dos_density(word: &VerblunskyWord, tau: f64, route: DosRoute) -> Result<f64> {
    Spectrum::from_word(word)?.dos_density(tau, route)
}

pub fn dos_lower_bound(word: &VerblunskyWord, tau: f64) -> Result<f64> {
    Spectrum::from_word(word)?.dos_lower_bound(tau)
}

pub fn schur_values(word: &VerblunskyWord, tau: f64) -> Result<SchurSample> {
    Spectrum::from_word(word)?.schur_values(tau)
}

pub fn schur_dos_bound(word: &VerblunskyWord, tau: f64) -> Result<f64> {
    Spectrum::from_word(word)?.schur_dos_bound(tau)
}

pub fn periodic_restriction_spectrum(word: &VerblunskyWord, n: usize) -> Result<Vec<f64>> {
    Spectrum::from_word(word)?.periodic_restriction_spectrum(n)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `tau_left,tau_right` per band.
pub fn bands_csv(bands: &BandList) -> String {
    let mut s = String::from("tau_left,tau_right\n");
    for b in &bands.bands {
        let _ = writeln!(s, "{},{}", num(b.left), num(b.right));
    }
    s
}

/// `tau,density,lower_bound,schur_bound` per grid point.
pub fn dos_csv(dos: &DOSProfile) -> String {
    let mut s = String::from("tau,density,lower_bound,schur_bound\n");
    for i in 0..dos.tau_grid.len() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            num(dos.tau_grid[i]),
            num(dos.density[i]),
            num(dos.lower_bound[i]),
            num(dos.schur_bound[i])
        );
    }
    s
}

/// `z_re,z_im,residual` per sample.
pub fn thouless_csv(rows: &[(Complex64, f64)]) -> String {
    let mut s = String::from("z_re,z_im,residual\n");
    for (z, r) in rows {
        let _ = writeln!(s, "{},{},{}", num(z.re), num(z.im), num(*r));
    }
    s
}

#[cfg(test)]
mod tests;
