use std::f64::consts::{PI, TAU};

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use super::bands::Arc;
use super::dos::{DOSProfile, Spectrum};
use crate::error::{Error, Result};
use crate::transfer::{lyapunov, SpectralParameter};

/// Cells whose centre lies within this angle of `arg z` use the split kernel.
const NEAR: f64 = 1.0;

/// `log|z - e^{iu} e^{i arg z}|` as a function of the relative angle `u`.
fn kernel(r: f64, u: f64) -> f64 {
    let s = (0.5 * u).sin();
    0.5 * ((1.0 - r).powi(2) + 4.0 * r * s * s).ln()
}

/// `int_a^b (1/2) log(u^2 + c^2) du`.
fn log_quadratic_integral(a: f64, b: f64, c: f64) -> f64 {
    let f = |u: f64| {
        let base = if u == 0.0 { 0.0 } else { u * (u * u + c * c).ln() };
        let at = if c == 0.0 { 0.0 } else { 2.0 * c * (u / c).atan() };
        0.5 * (base - 2.0 * u + at)
    };
    f(b) - f(a)
}

/// `kernel - (1/2) log(r (u^2 + c^2))`, smooth in `u`.
fn kernel_remainder(r: f64, u: f64) -> f64 {
    let s = (0.5 * u).sin();
    let num = (1.0 - r).powi(2) + 4.0 * r * s * s;
    let den = (1.0 - r).powi(2) + r * u * u;
    if den == 0.0 {
        0.0
    } else {
        0.5 * (num / den).ln()
    }
}

/// `int log|z - w| d nu(w)` against the cell masses of a profile.
///
/// Each cell carries its exact mass; within a cell the mass is spread
/// uniformly and the kernel is integrated by three-point Gauss rules. Near
/// `arg z` the logarithmic part of the kernel is integrated in closed form
/// and only the smooth remainder goes through the Gauss rule.
pub fn log_potential(z: Complex64, dos: &DOSProfile) -> Result<f64> {
    let g = &dos.tau_grid;
    if g.len() < 9 || (dos.total_mass() - 1.0).abs() > 1e-8 {
        return Err(Error::QuadratureNotConverged(dos.total_mass()));
    }
    let r = z.norm();
    if r == 0.0 {
        return Ok(0.0);
    }
    let phi = z.arg();
    let c = (1.0 - r).abs() / r.sqrt();
    let gl = GaussLegendre::new(NonZeroUsize::new(3).unwrap());
    let mut total = 0.0;
    for i in 0..g.len() - 1 {
        let mass = dos.cdf[i + 1] - dos.cdf[i];
        if mass == 0.0 {
            continue;
        }
        let h = g[i + 1] - g[i];
        let um = (0.5 * (g[i] + g[i + 1]) - phi + PI).rem_euclid(TAU) - PI;
        let (ua, ub) = (um - 0.5 * h, um + 0.5 * h);
        let integral = if um.abs() < NEAR {
            0.5 * r.ln() * h + log_quadratic_integral(ua, ub, c) + gl.integrate(ua, ub, |u| kernel_remainder(r, u))
        } else {
            gl.integrate(ua, ub, |u| kernel(r, u))
        };
        let v = integral / h;
        total += mass * v;
    }
    Ok(total)
}

/// Thouless residual `int log|z - w| d nu(w) - L(z) - log|z|/2 - log rho_inf`.
///
/// `L` is the exponent of the two-sided transfer matrices, which grows like
/// `log|z|/2` slower than the one-sided Szego recursion; the extra term
/// vanishes on the unit circle.
pub fn thouless_check(spec: &Spectrum, z: Complex64, dos: &DOSProfile) -> Result<f64> {
    let pot = log_potential(z, dos)?;
    let l = lyapunov(spec.word(), SpectralParameter::new(z)?)?;
    Ok(pot - l - 0.5 * z.norm().ln() - spec.log_rho_inf())
}

/// The constant `c = log(2/rho_inf)`.
pub fn craig_simon_constant(spec: &Spectrum) -> f64 {
    2f64.ln() - spec.log_rho_inf()
}

/// Smallest slack `c/(-log Leb A) - nu(A)` over `arcs`, each of length below 1/2.
pub fn craig_simon_check(spec: &Spectrum, arcs: &[Arc]) -> Result<f64> {
    let c = craig_simon_constant(spec);
    let mut worst = f64::INFINITY;
    for a in arcs {
        let len = a.length();
        if len >= 0.5 {
            return Err(Error::ArcTooLong(len));
        }
        let nu = spec.nu_arc(a.left, a.right);
        let bound = if len == 0.0 { 0.0 } else { c / -len.ln() };
        worst = worst.min(bound - nu);
    }
    Ok(worst)
}
