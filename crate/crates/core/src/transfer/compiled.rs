use num_complex::Complex64;

use super::lift::{Lifted, Rotation};
use super::ScaledMat;
use crate::cmv::VerblunskyWord;
use crate::su11::Mat2C;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Monodromy of one period, evaluated on the unit circle.
///
/// `dm` is `d Phi / d tau` and shares the scale of `mat`; `psi` is the lift
/// angle of the boundary action (see [`Lifted`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleEval {
    pub mat: ScaledMat,
    pub dm: Option<Mat2C>,
    pub psi: Option<f64>,
}

impl CircleEval {
    /// `Delta(e^{i tau})`, possibly infinite with the right sign.
    pub fn discriminant(&self) -> f64 {
        self.mat.trace().re
    }

    /// `d Delta / d tau`.
    pub fn discriminant_derivative(&self) -> Option<f64> {
        self.dm.map(|d| {
            let t = d.trace().re;
            if t == 0.0 {
                0.0
            } else {
                t * self.mat.log_scale.exp()
            }
        })
    }

    /// `log |d Delta/d tau|`, finite even when the derivative overflows.
    pub fn log_abs_discriminant_derivative(&self) -> Option<f64> {
        self.dm.map(|d| d.trace().re.abs().ln() + self.mat.log_scale)
    }

    pub fn lifted(&self) -> Option<Lifted> {
        self.psi.map(|psi| Lifted { mat: self.mat, psi })
    }

    pub fn rotation(&self) -> Option<Rotation> {
        self.lifted().map(|l| l.rotation())
    }
}

/// Anything with a periodic monodromy: plain words and structured words built
/// from rotated powers of a base word.
pub trait MonodromySource: Send + Sync {
    /// Period `q` (even).
    fn period(&self) -> usize;
    /// `Phi(z)` for any nonzero `z`.
    fn monodromy_at(&self, z: Complex64) -> ScaledMat;
    /// `Phi(e^{i tau})` with optional derivative and lift.
    fn circle(&self, tau: f64, derivative: bool, lift: bool) -> CircleEval;
    /// `(1/2q) sum_n log(1 - |alpha_n|^2)`.
    fn log_rho_inf(&self) -> f64;
}

/// A word with its two-step matrices pre-expanded as
/// `T_j(z) = [[a0 + a1 z, b0 + b1/z], [c0 + c1 z, d0 + d1/z]]`.
#[derive(Debug, Clone)]
pub struct CompiledWord {
    q: usize,
    coeffs: Vec<[Complex64; 8]>,
    /// `alpha_{j+1}^* alpha_j lambda_{j+1} lambda_j` and `conj(lambda_{j+1} lambda_j)^2` per two-step.
    lift_data: Vec<(Complex64, Complex64)>,
    phase_sum: f64,
    log_rho_inf: f64,
}

impl CompiledWord {
    pub fn new(word: &VerblunskyWord) -> Self {
        let q = word.q();
        let mut coeffs = Vec::with_capacity(q / 2);
        let mut lift_data = Vec::with_capacity(q / 2);
        for j in (0..q as i64).step_by(2) {
            let (p, qq) = (word.pair(j + 1), word.pair(j));
            let (a, l) = (p.alpha(), p.lambda());
            let (b, mu) = (qq.alpha(), qq.lambda());
            let s = 1.0 / (p.rho() * qq.rho());
            let c = [
                a.conj() * b,
                (l * mu).conj(),
                -b.conj() * l.conj(),
                -a.conj() * mu,
                -b * l,
                -a * mu.conj(),
                a * b.conj(),
                mu * l,
            ];
            coeffs.push(c.map(|x| x * s));
            let lm = l * mu;
            lift_data.push((a.conj() * b * lm, (lm * lm).conj()));
        }
        let phase_sum = word.pairs().iter().map(|p| p.lambda_arg()).sum();
        let log_rho_inf = word
            .pairs()
            .iter()
            .map(|p| (1.0 - p.alpha().norm_sqr()).ln())
            .sum::<f64>()
            / (2.0 * q as f64);
        Self {
            q,
            coeffs,
            lift_data,
            phase_sum,
            log_rho_inf,
        }
    }

    #[inline]
    fn t(c: &[Complex64; 8], z: Complex64, zi: Complex64) -> Mat2C {
        Mat2C::new(c[0] + c[1] * z, c[2] + c[3] * zi, c[4] + c[5] * z, c[6] + c[7] * zi)
    }

    fn eval(&self, z: Complex64, zi: Complex64, tau: Option<f64>, derivative: bool, lift: bool) -> CircleEval {
        let mut m = Mat2C::identity();
        let mut dm = Mat2C::new(ONE * 0.0, ONE * 0.0, ONE * 0.0, ONE * 0.0);
        let mut log_scale = 0.0;
        let i = Complex64::new(0.0, 1.0);
        let z2 = z * z;
        let zc = zi;
        // Orbit of x0 = 0 under the boundary action, with the running sum of Args.
        let mut w = ONE;
        let mut arg_sum = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let t = Self::t(c, z, zi);
            if derivative {
                let dt = Mat2C::new(i * c[1] * z, -i * c[3] * zi, i * c[5] * z, -i * c[7] * zi);
                dm = dt * m + t * dm;
            }
            if lift {
                let (cj, kj) = self.lift_data[k];
                let r = t.b / t.a;
                let u = (ONE + cj * zc) * (ONE + r * w.conj());
                arg_sum += u.arg();
                w = w * z2 * kj * (u / u.conj());
            }
            m = t * m;
            if k % 16 == 15 {
                let s = m.max_abs();
                if !(1e-64..=1e64).contains(&s) {
                    m = m.scale_re(1.0 / s);
                    dm = dm.scale_re(1.0 / s);
                    log_scale += s.ln();
                }
                if lift {
                    w /= w.norm();
                }
            }
        }
        let s = m.max_abs();
        let mat = ScaledMat {
            m: m.scale_re(1.0 / s),
            log_scale: log_scale + s.ln(),
        };
        let dm = derivative.then(|| dm.scale_re(1.0 / s));
        let psi = if lift {
            let tau = tau.expect("lift needs tau");
            let fx = 2.0 * ((self.q / 2) as f64 * tau - self.phase_sum) + 2.0 * arg_sum;
            let lifted = Lifted::from_orbit(mat, 0.0, fx);
            // The orbit start is badly conditioned next to the repelling point; redo from pi/2.
            let quality = (ONE + mat.m.b / mat.m.a).norm();
            if quality < 1e-6 {
                Some(self.lift_from(z, tau, std::f64::consts::FRAC_PI_2, mat))
            } else {
                Some(lifted.psi)
            }
        } else {
            None
        };
        CircleEval { mat, dm, psi }
    }

    fn lift_from(&self, z: Complex64, tau: f64, x0: f64, mat: ScaledMat) -> f64 {
        let z2 = z * z;
        let zc = z.conj();
        let mut w = Complex64::from_polar(1.0, x0);
        let mut arg_sum = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let (cj, kj) = self.lift_data[k];
            let p = c[0] + c[1] * z;
            let q = c[2] + c[3] * zc;
            let u = (ONE + cj * zc) * (ONE + (q / p) * w.conj());
            arg_sum += u.arg();
            w = w * z2 * kj * (u / u.conj());
            if k % 16 == 15 {
                w /= w.norm();
            }
        }
        let fx = x0 + 2.0 * ((self.q / 2) as f64 * tau - self.phase_sum) + 2.0 * arg_sum;
        Lifted::from_orbit(mat, x0, fx).psi
    }
}

impl MonodromySource for CompiledWord {
    fn period(&self) -> usize {
        self.q
    }

    fn monodromy_at(&self, z: Complex64) -> ScaledMat {
        self.eval(z, z.inv(), None, false, false).mat
    }

    fn circle(&self, tau: f64, derivative: bool, lift: bool) -> CircleEval {
        let z = Complex64::from_polar(1.0, tau);
        self.eval(z, z.conj(), Some(tau), derivative, lift)
    }

    fn log_rho_inf(&self) -> f64 {
        self.log_rho_inf
    }
}

/// Lift angle check used in tests: applies the lift of each two-step directly.
#[cfg(test)]
pub(crate) fn orbit_lift_reference(word: &VerblunskyWord, tau: f64, x0: f64) -> f64 {
    use super::lift::arg1;
    use super::{two_step, SpectralParameter};
    let mut x = x0;
    for j in (0..word.q() as i64).step_by(2) {
        let t = two_step(word, j, SpectralParameter::on_circle(tau)).unwrap();
        let (l, mu) = (word.pair(j + 1), word.pair(j));
        let c = l.alpha().conj() * mu.alpha() * l.lambda() * mu.lambda();
        let psi = tau - l.lambda_arg() - mu.lambda_arg() + arg1(c, tau);
        x = x + 2.0 * psi + 2.0 * arg1(t.b / t.a, x);
    }
    x
}
