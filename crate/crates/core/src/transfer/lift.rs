//! Lifts of the boundary action of SU(1,1) and the rotation number.
//!
//! For `A = [[p, q], [conj q, conj p]]` and `w = e^{ix}` on the circle,
//! `A.w = w e^{2i arg(p + q conj(w))}`. A lift of this circle map is fixed by
//! a real angle `psi` with `e^{2 i psi} = (p/|p|)^2`:
//!
//! `F(x) = x + 2 psi + 2 Arg(1 + (q/p) e^{-ix})`,
//!
//! where `Arg` is principal (its argument lies in the right half plane). Along
//! the unit circle every two-step transfer matrix turns the boundary forward
//! as `tau` grows, so the lift of the monodromy carries a rotation number that
//! is nondecreasing in `tau`, equals a multiple of `2 pi` on each gap and
//! increases by `2 pi` across each band.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::ScaledMat;
use crate::su11::Mat2C;

/// A scaled SU(1,1) matrix together with a lift angle `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifted {
    pub mat: ScaledMat,
    pub psi: f64,
}

/// Principal argument of `1 + r e^{-ix}` for `|r| < 1`.
#[inline]
pub(crate) fn arg1(r: Complex64, x: f64) -> f64 {
    (Complex64::new(1.0, 0.0) + r * Complex64::from_polar(1.0, -x)).arg()
}

/// `q / p` of a (scaled) SU(1,1) mantissa.
#[inline]
fn ratio(m: &Mat2C) -> Complex64 {
    m.b / m.a
}

/// Snaps `psi` to the nearest angle congruent to `arg p` modulo `pi`.
fn snap(psi: f64, m: &Mat2C) -> f64 {
    let a = m.a.arg();
    a + PI * ((psi - a) / PI).round()
}

impl Lifted {
    pub fn identity() -> Self {
        Self {
            mat: ScaledMat::identity(),
            psi: 0.0,
        }
    }

    /// Lift from one orbit value: `fx = F(x0)`.
    pub fn from_orbit(mat: ScaledMat, x0: f64, fx: f64) -> Self {
        let r = ratio(&mat.m);
        let psi = 0.5 * (fx - x0) - arg1(r, x0);
        Self {
            psi: snap(psi, &mat.m),
            mat,
        }
    }

    /// The lift evaluated at `x`.
    pub fn apply(&self, x: f64) -> f64 {
        x + 2.0 * self.psi + 2.0 * arg1(ratio(&self.mat.m), x)
    }

    /// Lift of `self * rhs` (`rhs` acts first).
    pub fn mul(&self, rhs: &Lifted) -> Lifted {
        let mat = self.mat.mul(&rhs.mat);
        let (ra, rb, rab) = (ratio(&self.mat.m), ratio(&rhs.mat.m), ratio(&mat.m));
        let one = Complex64::new(1.0, 0.0);
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..4 {
            let x = k as f64 * PI / 2.0;
            let e = Complex64::from_polar(1.0, -x);
            let y = rhs.apply(x);
            let ey = Complex64::from_polar(1.0, -y);
            let quality = (one + rb * e)
                .norm()
                .min((one + rab * e).norm())
                .min((one + ra * ey).norm());
            if quality > best.0 {
                best = (quality, x);
            }
        }
        let x = best.1;
        let y = rhs.apply(x);
        let raw = self.psi + rhs.psi + arg1(rb, x) + arg1(ra, y) - arg1(rab, x);
        Lifted {
            psi: snap(raw, &mat.m),
            mat,
        }
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Lifted {
        let mut result = Lifted::identity();
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

    /// Rotation number of the lifted boundary action.
    pub fn rotation(&self) -> Rotation {
        rotation_of(&self.mat, self.psi)
    }
}

/// Rotation number `r` (radians) of a lifted monodromy, with its spectral type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub r: f64,
    /// True when `|Delta| >= 2`; then `r` is a multiple of `2 pi`.
    pub in_gap: bool,
}

impl Rotation {
    /// `r / 2 pi` rounded, the gap label on gaps.
    pub fn level(&self) -> i64 {
        (self.r / TAU).round() as i64
    }
}

fn rotation_of(mat: &ScaledMat, psi: f64) -> Rotation {
    // Everything below is homogeneous in the entries, so the mantissa suffices.
    // Elliptic iff |Re p| < 1 iff |q| < |Im p| (from |p|^2 - |q|^2 = 1); the
    // second form keeps its accuracy near rotations by tiny angles.
    let m = &mat.m;
    let (p, q) = (m.a, m.b);
    let (ip, aq) = (p.im.abs(), q.norm());
    let r = ratio(m);
    if ip <= aq {
        // Hyperbolic or parabolic: the lift has a fixed point modulo 2 pi.
        let x = attracting_fixed_point(m).unwrap_or(0.0);
        let raw = 2.0 * psi + 2.0 * arg1(r, x);
        return Rotation {
            r: TAU * (raw / TAU).round(),
            in_gap: aq > ip,
        };
    }
    // Elliptic: conjugate to a rotation by M_xi with xi the interior fixed point.
    let s = ((ip - aq) * (ip + aq)).sqrt();
    let sign = if p.im >= 0.0 { 1.0 } else { -1.0 };
    let xi = Complex64::new(0.0, 1.0) * q / (p.im + sign * s);
    // theta from M^{-1} A M = R_theta; its (1,1) entry is a positive multiple of e^{i theta}.
    let e11 = p + q * xi.conj() - xi * (q.conj() + p.conj() * xi.conj());
    let theta = e11.arg();
    let beta = (2.0 * theta).rem_euclid(TAU);
    // Lift of M_xi is H(x) = x + 2 Arg(1 + xi e^{-ix}); the base point H(0) is
    // mapped by the lift of A to H(R).
    let x = 2.0 * arg1(xi, 0.0);
    let fx = x + 2.0 * psi + 2.0 * arg1(r, x);
    let k = fx - x + 2.0 * arg1(xi, 0.0);
    let n = ((k - beta - 2.0 * arg1(xi, beta)) / TAU).round();
    Rotation {
        r: beta + TAU * n,
        in_gap: false,
    }
}

/// The attracting boundary fixed point of a non-elliptic element, as an angle.
fn attracting_fixed_point(m: &Mat2C) -> Option<f64> {
    let (p, q) = (m.a, m.b);
    let disc = q.norm_sqr() - p.im * p.im;
    if q.norm() == 0.0 {
        return None;
    }
    let root = disc.max(0.0).sqrt();
    let r = q / p;
    let one = Complex64::new(1.0, 0.0);
    [root, -root]
        .iter()
        .map(|&s| {
            let w = (Complex64::new(s, p.im)) / q.conj();
            w.arg()
        })
        .max_by(|&a, &b| {
            let qa = (one + r * Complex64::from_polar(1.0, -a)).norm();
            let qb = (one + r * Complex64::from_polar(1.0, -b)).norm();
            qa.partial_cmp(&qb).unwrap_or(std::cmp::Ordering::Equal)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su11::RotationElement;

    fn lifted_rotation(theta: f64, turns: f64) -> Lifted {
        let m = ScaledMat::from_mat(RotationElement::new(theta).matrix());
        Lifted {
            mat: m,
            psi: theta + PI * turns,
        }
    }

    #[test]
    fn rotation_of_diagonal() {
        let l = lifted_rotation(0.4, 0.0);
        let r = l.rotation();
        assert!((r.r - 0.8).abs() < 1e-14);
        assert!(!r.in_gap);
        let l = lifted_rotation(0.4, 1.0);
        assert!((l.rotation().r - 0.8 - TAU).abs() < 1e-13);
        assert!((l.apply(1.0) - 1.0 - 0.8 - TAU).abs() < 1e-13);
    }

    #[test]
    fn rotation_of_conjugated_elliptic() {
        use crate::su11::{conjugator_from_fixed_point, DiskPoint};
        let m = conjugator_from_fixed_point(DiskPoint::new(Complex64::new(0.5, -0.3)).unwrap());
        for theta in [0.3, 1.2, 2.5, -0.7] {
            let a = m.matrix() * RotationElement::new(theta).matrix() * m.inverse().matrix();
            // Lift by homotopy from the identity: psi follows arg p continuously.
            let mut l = Lifted::identity();
            let steps = 200;
            for s in 1..=steps {
                let t = theta * s as f64 / steps as f64;
                let b = m.matrix() * RotationElement::new(t).matrix() * m.inverse().matrix();
                let raw = l.psi;
                l = Lifted {
                    mat: ScaledMat::from_mat(b),
                    psi: snap(raw, &ScaledMat::from_mat(b).m),
                };
            }
            assert!(l.mat.m.dist_inf(&ScaledMat::from_mat(a).m) < 1e-12);
            assert!(
                (l.rotation().r - 2.0 * theta).abs() < 1e-10,
                "{theta}: {}",
                l.rotation().r
            );
        }
    }

    #[test]
    fn power_multiplies_rotation() {
        let l = lifted_rotation(0.9, 0.0);
        let p = l.pow(7);
        assert!((p.rotation().r - 7.0 * 1.8).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_rotation_is_multiple_of_two_pi() {
        let t: f64 = 2.0;
        let h = Mat2C::new(
            Complex64::new(t.cosh(), 0.0),
            Complex64::new(t.sinh(), 0.0),
            Complex64::new(t.sinh(), 0.0),
            Complex64::new(t.cosh(), 0.0),
        );
        let l = Lifted {
            mat: ScaledMat::from_mat(h),
            psi: TAU,
        };
        let r = l.rotation();
        assert!(r.in_gap);
        assert_eq!(r.level(), 2);
        let big = l.pow(1000);
        assert_eq!(big.rotation().level(), 2000);
        assert!(big.mat.log_scale > 1900.0);
    }
}
