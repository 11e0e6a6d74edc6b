use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bands::{band_list_of, map_grid, rotation_at, BandList, BandUnit};
use crate::cmv::VerblunskyWord;
use crate::error::{Error, Result};
use crate::su11::{conjugator_from_fixed_point, elliptic_fixed_point, hs_norm_sq, itrace, DiskPoint, SU11Element};
use crate::transfer::{shifted_monodromy, t_inv_dt, CompiledWord, MonodromySource, SpectralParameter};

/// Default scan density per unit of period.
pub const GRID_PER_Q: usize = 8 * 64;
/// Default band-edge tolerance on `|Delta| - 2`.
pub const EDGE_TOL: f64 = 1e-10;
/// `|Delta|` must stay this far below 2 for the fixed-point formulas.
const INTERIOR_MARGIN: f64 = 1e-9;
/// Below this edge distance the finite-difference step loses all accuracy.
const MIN_EDGE_DISTANCE: f64 = 8e-8;

/// Density route for [`Spectrum::dos_density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DosRoute {
    /// Central differences of the rotation angle with one Richardson step.
    Numeric,
    /// Shift sum of iTraces of the conjugated `T^{-1} dT`.
    Itrace,
}

/// Schur values at one point: `s_{2j}` for even shifts and the fixed points
/// `xi_{2j} = conj(e^{i tau} s_{2j})` of the shifted monodromies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurSample {
    pub tau: f64,
    pub values: Vec<Complex64>,
    pub fixed_points: Vec<Complex64>,
}

/// Sampled density of states on a uniform grid over `[0, 2 pi]`.
///
/// `cdf` is exact at the grid points (from the rotation number). The two
/// bound columns are zero where undefined (gaps and band edges).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DOSProfile {
    pub tau_grid: Vec<f64>,
    pub density: Vec<f64>,
    pub cdf: Vec<f64>,
    pub lower_bound: Vec<f64>,
    pub schur_bound: Vec<f64>,
}

impl DOSProfile {
    pub fn total_mass(&self) -> f64 {
        self.cdf.last().copied().unwrap_or(0.0) - self.cdf.first().copied().unwrap_or(0.0)
    }

    /// Linear interpolation of the cumulative measure at `tau` in `[0, 2 pi]`.
    pub fn cdf_at(&self, tau: f64) -> f64 {
        let g = &self.tau_grid;
        let n = g.len() - 1;
        let t = tau.clamp(g[0], g[n]);
        let i = g.partition_point(|&x| x <= t).clamp(1, n);
        let (a, b) = (g[i - 1], g[i]);
        let w = if b > a { (t - a) / (b - a) } else { 0.0 };
        self.cdf[i - 1] + w * (self.cdf[i] - self.cdf[i - 1])
    }
}

/// A periodic word with its compiled monodromy and band structure.
#[derive(Debug, Clone)]
pub struct Spectrum {
    word: VerblunskyWord,
    compiled: CompiledWord,
    bands: BandList,
}

/// Fixed-point data at one band-interior point.
struct ShiftData {
    xis: Vec<DiskPoint>,
    itraces: Vec<f64>,
}

impl Spectrum {
    pub fn new(word: &VerblunskyWord, grid_size: usize, edge_tol: f64) -> Result<Self> {
        let compiled = CompiledWord::new(word);
        let bands = band_list_of(&compiled, grid_size, edge_tol)?;
        Ok(Self {
            word: word.clone(),
            compiled,
            bands,
        })
    }

    /// Default grid `8q * 64` and edge tolerance `1e-10`.
    pub fn from_word(word: &VerblunskyWord) -> Result<Self> {
        Self::new(word, GRID_PER_Q * word.q(), EDGE_TOL)
    }

    pub fn word(&self) -> &VerblunskyWord {
        &self.word
    }

    pub fn q(&self) -> usize {
        self.word.q()
    }

    pub fn bands(&self) -> &BandList {
        &self.bands
    }

    pub fn compiled(&self) -> &CompiledWord {
        &self.compiled
    }

    pub fn discriminant(&self, tau: f64) -> f64 {
        self.compiled.circle(tau, false, false).discriminant()
    }

    /// Lifted rotation number of the monodromy at `e^{i tau}`.
    pub fn rotation_number(&self, tau: f64) -> f64 {
        rotation_at(&self.compiled, tau).r
    }

    /// `log rho_inf = (1/2q) sum log(1 - |alpha_n|^2)`.
    pub fn log_rho_inf(&self) -> f64 {
        self.compiled.log_rho_inf()
    }

    fn require_band(&self, tau: f64) -> Result<f64> {
        let d = self.discriminant(tau);
        if d.abs() > 2.0 {
            return Err(Error::OutsideBand { tau, discriminant: d });
        }
        Ok(d)
    }

    /// `theta = arccos(Delta/2)` in `[0, pi]`.
    pub fn rotation_angle(&self, tau: f64) -> Result<f64> {
        let d = self.require_band(tau)?;
        Ok((0.5 * d).clamp(-1.0, 1.0).acos())
    }

    /// Distance from `tau` to the nearest edge of its band (infinite when the
    /// spectrum is the whole circle).
    pub fn edge_distance(&self, tau: f64) -> Option<f64> {
        self.bands.band_containing(tau).map(|b| b.edge_distance(tau))
    }

    /// `nu` of the arc `[left, right]` with `right >= left`, exact from the
    /// rotation number.
    pub fn nu_arc(&self, left: f64, right: f64) -> f64 {
        (self.rotation_number(right) - self.rotation_number(left)) / (TAU * self.q() as f64)
    }

    fn shift_data(&self, tau: f64) -> Result<ShiftData> {
        let d = self.require_band(tau)?;
        if d.abs() > 2.0 - INTERIOR_MARGIN {
            return Err(Error::NearEdge {
                tau,
                distance: 2.0 - d.abs(),
            });
        }
        let z = SpectralParameter::on_circle(tau);
        let half = self.q() / 2;
        let mut xis = Vec::with_capacity(half);
        let mut itraces = Vec::with_capacity(half);
        for l in 0..half as i64 {
            let phi = shifted_monodromy(&self.word, 2 * l, z)?;
            let xi = elliptic_fixed_point(&SU11Element::from_mat(&phi)?)?;
            let m = conjugator_from_fixed_point(xi).matrix();
            let g = t_inv_dt(&self.word, 2 * l, z)?;
            itraces.push(itrace(&(m.inverse() * g * m)).re);
            xis.push(xi);
        }
        Ok(ShiftData { xis, itraces })
    }

    /// `d nu / d tau` at a band-interior point.
    pub fn dos_density(&self, tau: f64, route: DosRoute) -> Result<f64> {
        let q = self.q() as f64;
        match route {
            DosRoute::Itrace => {
                let s = self.shift_data(tau)?;
                Ok(s.itraces.iter().sum::<f64>().abs() / (PI * q))
            }
            DosRoute::Numeric => {
                self.require_band(tau)?;
                let dist = self.edge_distance(tau).unwrap_or(0.0);
                if dist < MIN_EDGE_DISTANCE {
                    return Err(Error::NearEdge { tau, distance: dist });
                }
                let h = (1e-5f64).min(dist / 8.0);
                // theta' = R'/2 inside a band.
                let diff = |h: f64| (self.rotation_number(tau + h) - self.rotation_number(tau - h)) / (4.0 * h);
                let d = (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
                Ok(d.abs() / (PI * q))
            }
        }
    }

    /// `(1/4 pi q) sum_l ||M_{2l}||_2^2`.
    pub fn dos_lower_bound(&self, tau: f64) -> Result<f64> {
        let s = self.shift_data(tau)?;
        Ok(lower_bound_of(&s.xis, self.q()))
    }

    pub fn schur_values(&self, tau: f64) -> Result<SchurSample> {
        let s = self.shift_data(tau)?;
        let e = Complex64::from_polar(1.0, -tau);
        Ok(SchurSample {
            tau,
            values: s.xis.iter().map(|x| x.value().conj() * e).collect(),
            fixed_points: s.xis.iter().map(|x| x.value()).collect(),
        })
    }

    /// `(1/pi q) sum_j 1/(1 - |s_{2j}|^2)`.
    pub fn schur_dos_bound(&self, tau: f64) -> Result<f64> {
        let s = self.shift_data(tau)?;
        Ok(schur_bound_of(&s.xis, self.q()))
    }

    /// Schur values from the contracting eigenvector `(1, z s(z))` of
    /// `Phi_{2j}(z)` at `z = (1 - eps) e^{i tau}`.
    pub fn schur_values_eigenvector(&self, tau: f64, eps: f64) -> Result<Vec<Complex64>> {
        let z = Complex64::from_polar(1.0 - eps, tau);
        let zp = SpectralParameter::new(z)?;
        (0..self.q() as i64 / 2)
            .map(|l| {
                let m = shifted_monodromy(&self.word, 2 * l, zp)?;
                let tr = m.trace();
                let disc = (tr * tr * 0.25 - m.det()).sqrt();
                let (m1, m2) = (tr * 0.5 + disc, tr * 0.5 - disc);
                let mu = if m1.norm() < m2.norm() { m1 } else { m2 };
                // (a - mu) + b v = 0 or c + (d - mu) v = 0, whichever is better conditioned.
                let v = if m.b.norm() >= (m.d - mu).norm() {
                    (mu - m.a) / m.b
                } else {
                    -m.c / (m.d - mu)
                };
                Ok(v / z)
            })
            .collect()
    }

    /// Density, cumulative measure and both lower bounds on `n + 1` uniform
    /// points of `[0, 2 pi]`.
    pub fn dos_profile(&self, n: usize) -> DOSProfile {
        let n = n.max(1);
        let grid: Vec<f64> = (0..=n).map(|i| TAU * i as f64 / n as f64).collect();
        let q = self.q();
        let rows: Vec<(f64, f64, f64, f64)> = map_grid(&grid, |t| {
            let r = self.rotation_number(t);
            match self.shift_data(t) {
                Ok(s) => (
                    r,
                    s.itraces.iter().sum::<f64>().abs() / (PI * q as f64),
                    lower_bound_of(&s.xis, q),
                    schur_bound_of(&s.xis, q),
                ),
                Err(_) => {
                    let h = 1e-7;
                    let d = (self.rotation_number(t + h) - self.rotation_number(t - h)) / (2.0 * h);
                    (r, d.abs() / (TAU * q as f64), 0.0, 0.0)
                }
            }
        });
        let r0 = rows[0].0;
        DOSProfile {
            cdf: rows.iter().map(|x| (x.0 - r0) / (TAU * q as f64)).collect(),
            density: rows.iter().map(|x| x.1).collect(),
            lower_bound: rows.iter().map(|x| x.2).collect(),
            schur_bound: rows.iter().map(|x| x.3).collect(),
            tau_grid: grid,
        }
    }

    /// The angle in `unit` where the rotation number equals `2 pi level + s`,
    /// for `s` in `[0, 2 pi]`.
    pub fn tau_at_rotation(&self, unit: &BandUnit, s: f64) -> f64 {
        let target = TAU * unit.level as f64 + s;
        let (mut lo, mut hi) = (unit.arc.left, unit.arc.right);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.rotation_number(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `int f d nu` by Gauss-Legendre in the rotation number on each band unit.
    pub fn integrate_nu<F: Fn(f64) -> Complex64>(&self, f: F, degree: usize) -> Complex64 {
        let gl = GaussLegendre::new(NonZeroUsize::new(degree.max(1)).unwrap());
        let norm = 1.0 / (TAU * self.q() as f64);
        self.bands
            .units
            .iter()
            .map(|u| {
                let re = gl.integrate(0.0, TAU, |s| f(self.tau_at_rotation(u, s)).re);
                let im = gl.integrate(0.0, TAU, |s| f(self.tau_at_rotation(u, s)).im);
                Complex64::new(re, im) * norm
            })
            .sum()
    }

    /// `int density d tau` over a band unit, with the substitution
    /// `tau = a + (b - a)(1 - cos phi)/2` that removes the edge singularities.
    pub fn unit_mass(&self, unit: &BandUnit, degree: usize, route: DosRoute) -> Result<f64> {
        let gl = GaussLegendre::new(NonZeroUsize::new(degree.max(1)).unwrap());
        let (a, b) = (unit.arc.left, unit.arc.right);
        let mut err = None;
        let v = gl.integrate(0.0, PI, |phi| {
            let t = a + 0.5 * (b - a) * (1.0 - phi.cos());
            match self.dos_density(t, route) {
                Ok(d) => d * 0.5 * (b - a) * phi.sin(),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
}

fn lower_bound_of(xis: &[DiskPoint], q: usize) -> f64 {
    xis.iter()
        .map(|&x| hs_norm_sq(&conjugator_from_fixed_point(x).matrix()))
        .sum::<f64>()
        / (4.0 * PI * q as f64)
}

fn schur_bound_of(xis: &[DiskPoint], q: usize) -> f64 {
    xis.iter().map(|x| 1.0 / (1.0 - x.value().norm_sqr())).sum::<f64>() / (PI * q as f64)
}
