//! Gesztesy-Zinchenko transfer matrices, cocycle products, monodromy,
//! discriminant and Lyapunov exponents of periodic words.

mod compiled;
mod lift;

pub use compiled::{CircleEval, CompiledWord, MonodromySource};
pub use lift::{Lifted, Rotation};

use num_complex::Complex64;

use crate::cmv::{VerblunskyPair, VerblunskyWord};
use crate::error::{Error, Result};
use crate::su11::Mat2C;

/// `|n - m|` above which cocycle products are accumulated with a separate log scale.
pub const SCALED_THRESHOLD: i64 = 500;
/// Tolerance for `|z| = 1`.
pub const CIRCLE_TOL: f64 = 1e-12;

/// A nonzero spectral parameter, optionally tagged with `tau` when `z = e^{i tau}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    z: Complex64,
    tau: Option<f64>,
}

impl SpectralParameter {
    pub fn new(z: Complex64) -> Result<Self> {
        if z == Complex64::new(0.0, 0.0) || !z.is_finite() {
            return Err(Error::ZeroSpectralParameter);
        }
        Ok(Self { z, tau: None })
    }

    pub fn on_circle(tau: f64) -> Self {
        Self {
            z: Complex64::from_polar(1.0, tau),
            tau: Some(tau),
        }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    pub fn is_on_circle(&self) -> bool {
        self.tau.is_some() || (self.z.norm() - 1.0).abs() <= CIRCLE_TOL
    }
}

/// A matrix stored as `m * e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMat {
    pub m: Mat2C,
    pub log_scale: f64,
}

impl ScaledMat {
    pub fn identity() -> Self {
        Self {
            m: Mat2C::identity(),
            log_scale: 0.0,
        }
    }

    pub fn from_mat(m: Mat2C) -> Self {
        Self { m, log_scale: 0.0 }.normalized()
    }

    /// Rescales so the largest entry has modulus one.
    pub fn normalized(mut self) -> Self {
        let s = self.m.max_abs();
        if s > 0.0 && s.is_finite() && s != 1.0 {
            self.m = self.m.scale_re(1.0 / s);
            self.log_scale += s.ln();
        }
        self
    }

    pub fn mul(&self, rhs: &ScaledMat) -> ScaledMat {
        ScaledMat {
            m: self.m * rhs.m,
            log_scale: self.log_scale + rhs.log_scale,
        }
        .normalized()
    }

    /// The plain matrix; overflows to infinity when the scale is too large.
    pub fn to_mat(&self) -> Mat2C {
        self.m.scale_re(self.log_scale.exp())
    }

    /// Trace, possibly infinite with the correct sign.
    pub fn trace(&self) -> Complex64 {
        let t = self.m.trace();
        if self.log_scale == 0.0 {
            t
        } else {
            let e = self.log_scale.exp();
            Complex64::new(scale_component(t.re, e), scale_component(t.im, e))
        }
    }

    /// `log` of the spectral radius, from the trace-determinant quadratic.
    pub fn log_spectral_radius(&self) -> f64 {
        let t = self.m.trace();
        let d = self.m.det();
        let disc = (t * t / 4.0 - d).sqrt();
        let mu1 = t / 2.0 + disc;
        let mu2 = t / 2.0 - disc;
        mu1.norm().max(mu2.norm()).ln() + self.log_scale
    }
}

fn scale_component(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * e
    }
}

/// `P(alpha, lambda) = rho^{-1} [[-conj alpha, 1/lambda], [lambda, -alpha]]`.
pub fn gz_p(pair: &VerblunskyPair, _z: SpectralParameter) -> Mat2C {
    let a = pair.alpha();
    let l = pair.lambda();
    Mat2C::new(-a.conj(), l.conj(), l, -a).scale_re(1.0 / pair.rho())
}

/// `Q(alpha, lambda; z) = rho^{-1} [[-alpha, lambda/z], [z/lambda, -conj alpha]]`.
pub fn gz_q(pair: &VerblunskyPair, z: SpectralParameter) -> Result<Mat2C> {
    let z = z.z();
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroSpectralParameter);
    }
    let a = pair.alpha();
    let l = pair.lambda();
    Ok(Mat2C::new(-a, l / z, z * l.conj(), -a.conj()).scale_re(1.0 / pair.rho()))
}

/// `Y(n; z)`: `P` at odd `n`, `Q` at even `n`.
pub fn y_matrix(word: &VerblunskyWord, n: i64, z: SpectralParameter) -> Result<Mat2C> {
    let pair = word.pair(n);
    if n.rem_euclid(2) == 1 {
        Ok(gz_p(pair, z))
    } else {
        gz_q(pair, z)
    }
}

/// `Z(n, m; z)`, stored as a scaled matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CocycleProduct {
    pub matrix: Mat2C,
    pub log_scale: f64,
    pub from_index: i64,
    pub to_index: i64,
    pub det_parity: i32,
}

impl CocycleProduct {
    /// The product without separate scale.
    pub fn full(&self) -> Mat2C {
        self.matrix.scale_re(self.log_scale.exp())
    }
}

/// `Z(n, m; z) = Y(n-1) ... Y(m)` for `n >= m` and `Z(m, n)^{-1}` otherwise.
pub fn cocycle(word: &VerblunskyWord, n: i64, m: i64, z: SpectralParameter) -> Result<CocycleProduct> {
    let (hi, lo) = if n >= m { (n, m) } else { (m, n) };
    let scaled = hi - lo > SCALED_THRESHOLD;
    let mut acc = ScaledMat::identity();
    for k in lo..hi {
        acc.m = y_matrix(word, k, z)? * acc.m;
        if scaled && (k - lo) % 16 == 15 {
            acc = acc.normalized();
        }
    }
    if scaled {
        acc = acc.normalized();
    }
    if n < m {
        // Inverse via the adjugate: the determinant is exactly +-1, so dividing
        // by a computed det would only add cancellation error.
        let sign = if (hi - lo) % 2 == 0 { 1.0 } else { -1.0 };
        let a = acc.m;
        acc = ScaledMat {
            m: Mat2C::new(a.d, -a.b, -a.c, a.a).scale_re(sign),
            log_scale: acc.log_scale,
        };
        if scaled {
            acc = acc.normalized();
        }
    }
    Ok(CocycleProduct {
        matrix: acc.m,
        log_scale: acc.log_scale,
        from_index: m,
        to_index: n,
        det_parity: if (n - m).rem_euclid(2) == 0 { 1 } else { -1 },
    })
}

fn require_even(j: i64) -> Result<()> {
    if j.rem_euclid(2) != 0 {
        Err(Error::OddIndex(j))
    } else {
        Ok(())
    }
}

/// `T_j = P(alpha_{j+1}, lambda_{j+1}) Q(alpha_j, lambda_j; z)` in closed form.
pub fn two_step(word: &VerblunskyWord, j: i64, z: SpectralParameter) -> Result<Mat2C> {
    require_even(j)?;
    let zz = z.z();
    if zz == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroSpectralParameter);
    }
    let (p, q) = (word.pair(j + 1), word.pair(j));
    let (a, l) = (p.alpha(), p.lambda());
    let (b, mu) = (q.alpha(), q.lambda());
    let s = 1.0 / (p.rho() * q.rho());
    Ok(Mat2C::new(
        a.conj() * b + zz / (l * mu),
        -a.conj() * mu / zz - b.conj() / l,
        -b * l - a * zz / mu,
        mu * l / zz + a * b.conj(),
    )
    .scale_re(s))
}

/// `T_j^{-1} dT_j/dtau = (i / rho_j^2) [[1, -conj(alpha_j) lambda_j / z], [alpha_j z / lambda_j, -1]]`.
pub fn t_inv_dt(word: &VerblunskyWord, j: i64, z: SpectralParameter) -> Result<Mat2C> {
    require_even(j)?;
    let zz = z.z();
    let off = zz.norm() - 1.0;
    if off.abs() > CIRCLE_TOL {
        return Err(Error::OffCircle(off));
    }
    let pair = word.pair(j);
    let (a, l) = (pair.alpha(), pair.lambda());
    let s = Complex64::new(0.0, 1.0 / (1.0 - a.norm_sqr()));
    Ok(Mat2C::new(
        Complex64::new(1.0, 0.0),
        -a.conj() * l / zz,
        a * zz / l,
        Complex64::new(-1.0, 0.0),
    )
    .scale(s))
}

/// `Phi_k = T_{k+q-2} ... T_k` (indices mod q) as a scaled product.
pub fn shifted_monodromy_scaled(word: &VerblunskyWord, k: i64, z: SpectralParameter) -> Result<ScaledMat> {
    require_even(k)?;
    let q = word.q() as i64;
    let mut acc = ScaledMat::identity();
    for (i, j) in (k..k + q).step_by(2).enumerate() {
        acc.m = two_step(word, j, z)? * acc.m;
        if i % 16 == 15 {
            acc = acc.normalized();
        }
    }
    Ok(acc.normalized())
}

/// `Phi(z) = T_{q-2} ... T_0`.
pub fn monodromy(word: &VerblunskyWord, z: SpectralParameter) -> Result<Mat2C> {
    Ok(shifted_monodromy_scaled(word, 0, z)?.to_mat())
}

/// `Phi_k(z) = T_{k-2} ... T_0 T_{q-2} ... T_k`, similar to `Phi`.
pub fn shifted_monodromy(word: &VerblunskyWord, k: i64, z: SpectralParameter) -> Result<Mat2C> {
    if !(0..word.q() as i64).contains(&k) {
        return Err(Error::InvalidArgument(format!("shift {k} outside [0, q)")));
    }
    Ok(shifted_monodromy_scaled(word, k, z)?.to_mat())
}

/// `Delta(z) = tr Phi(z)`; may be infinite far off the circle.
pub fn discriminant(word: &VerblunskyWord, z: SpectralParameter) -> Result<Complex64> {
    Ok(shifted_monodromy_scaled(word, 0, z)?.trace())
}

/// `L(z) = q^{-1} log spr Phi(z)`, zero exactly where `z` is on the circle with `|Delta| <= 2`.
pub fn lyapunov(word: &VerblunskyWord, z: SpectralParameter) -> Result<f64> {
    let phi = shifted_monodromy_scaled(word, 0, z)?;
    if z.is_on_circle() {
        let d = phi.trace().re;
        if d.abs() <= 2.0 {
            return Ok(0.0);
        }
        return Ok(log_cosh_inverse(d.abs() / 2.0, phi) / word.q() as f64);
    }
    Ok((phi.log_spectral_radius() / word.q() as f64).max(0.0))
}

/// `L(e^{i tau})` of any monodromy source, from the real discriminant.
pub fn circle_lyapunov<S: MonodromySource + ?Sized>(src: &S, tau: f64) -> f64 {
    let phi = src.circle(tau, false, false).mat;
    let d = phi.trace().re;
    if d.abs() <= 2.0 {
        return 0.0;
    }
    log_cosh_inverse(d.abs() / 2.0, phi) / src.period() as f64
}

/// `acosh(x)` for `x = |Delta|/2 >= 1`, falling back to the scaled form when `x` overflows.
fn log_cosh_inverse(x: f64, phi: ScaledMat) -> f64 {
    if x.is_finite() && x < 1e150 {
        x.acosh()
    } else {
        // acosh(x) = log(2x) up to O(x^-2)
        (phi.m.trace().re.abs()).ln() + phi.log_scale
    }
}
