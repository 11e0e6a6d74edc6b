//! Two-by-two complex matrices and the group SU(1,1).
//!
//! SU(1,1) is the group of matrices `[[p, q], [conj(q), conj(p)]]` with
//! `|p|^2 - |q|^2 = 1`. It acts on the open unit disk by Moebius maps, and
//! its elliptic elements (|tr| < 2) are conjugate to diagonal rotations
//! `R_theta = diag(e^{i theta}, e^{-i theta})` by the disk automorphism that
//! moves zero to the unique fixed point.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used to certify membership in SU(1,1).
pub const SU11_TOL: f64 = 1e-10;
/// Elliptic elements must satisfy `|tr| < 2 - ELLIPTIC_TOL`.
pub const ELLIPTIC_TOL: f64 = 1e-9;
/// Smallest admissible `|cz + d|` for a Moebius evaluation.
pub const POLE_TOL: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A general 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2C {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), d)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    /// Inverse through the adjugate; the caller guarantees `det != 0`.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    /// Entrywise maximum distance to another matrix.
    pub fn dist_inf(&self, other: &Mat2C) -> f64 {
        (*self - *other).max_abs()
    }

    /// `||M^* J M - J||_inf` with `J = diag(1, -1)`.
    pub fn j_unitarity_defect(&self) -> f64 {
        let j = Mat2C::diag(c(1.0, 0.0), c(-1.0, 0.0));
        (self.adjoint() * j * *self - j).max_abs()
    }

    /// `||M^* M - I||_inf`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2C::identity()).max_abs()
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    #[inline]
    fn mul(self, r: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, r: Mat2C) -> Mat2C {
        Mat2C::new(self.a + r.a, self.b + r.b, self.c + r.c, self.d + r.d)
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, r: Mat2C) -> Mat2C {
        Mat2C::new(self.a - r.a, self.b - r.b, self.c - r.c, self.d - r.d)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        Mat2C::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(value: Complex64) -> Result<Self> {
        if value.is_finite() && value.norm() < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::OutsideDisk(value.norm()))
        }
    }

    pub fn zero() -> Self {
        Self(c(0.0, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// `R_theta = diag(e^{i theta}, e^{-i theta})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationElement {
    pub theta: f64,
}

impl RotationElement {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    pub fn matrix(&self) -> Mat2C {
        let e = Complex64::from_polar(1.0, self.theta);
        Mat2C::diag(e, e.conj())
    }

    pub fn to_su11(&self) -> SU11Element {
        SU11Element {
            p: Complex64::from_polar(1.0, self.theta),
            q: c(0.0, 0.0),
        }
    }
}

/// An element `[[p, q], [conj(q), conj(p)]]` of SU(1,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU11Element {
    p: Complex64,
    q: Complex64,
}

impl SU11Element {
    /// Certifies `|p|^2 - |q|^2 = 1`.
    ///
    /// The defect is measured relative to `|p|^2 + |q|^2`, which is the size
    /// of the rounding error left by forming long matrix products.
    pub fn new(p: Complex64, q: Complex64) -> Result<Self> {
        let defect = su11_defect(p, q);
        if defect <= SU11_TOL {
            Ok(Self { p, q })
        } else {
            Err(Error::NotSu11(defect))
        }
    }

    /// Certifies that a general matrix has the SU(1,1) shape.
    pub fn from_mat(m: &Mat2C) -> Result<Self> {
        let scale = 1.0_f64.max(m.max_abs() * m.max_abs());
        let shape = ((m.a - m.d.conj()).norm() + (m.b - m.c.conj()).norm()) * m.max_abs();
        if !(shape <= SU11_TOL * scale) {
            return Err(Error::NotSu11(shape / scale));
        }
        Self::new(0.5 * (m.a + m.d.conj()), 0.5 * (m.b + m.c.conj()))
    }

    pub fn p(&self) -> Complex64 {
        self.p
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn matrix(&self) -> Mat2C {
        Mat2C::new(self.p, self.q, self.q.conj(), self.p.conj())
    }

    /// Inverse in SU(1,1): `[[conj p, -q], [-conj q, p]]`.
    pub fn inverse(&self) -> Self {
        Self {
            p: self.p.conj(),
            q: -self.q,
        }
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.p.re
    }

    pub fn is_elliptic(&self) -> bool {
        self.trace().abs() < 2.0 - ELLIPTIC_TOL
    }

    pub fn compose(&self, other: &SU11Element) -> Self {
        let m = self.matrix() * other.matrix();
        Self {
            p: 0.5 * (m.a + m.d.conj()),
            q: 0.5 * (m.b + m.c.conj()),
        }
    }
}

fn su11_defect(p: Complex64, q: Complex64) -> f64 {
    let pn = p.norm_sqr();
    let qn = q.norm_sqr();
    if !(pn.is_finite() && qn.is_finite()) {
        return f64::INFINITY;
    }
    (pn - qn - 1.0).abs() / (1.0 + pn + qn) * 2.0
}

/// Moebius action `(a z + b) / (c z + d)`.
pub fn mobius_apply(m: &Mat2C, z: Complex64) -> Result<Complex64> {
    let den = m.c * z + m.d;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    if den.norm() < POLE_TOL * scale {
        return Err(Error::Pole(den.norm()));
    }
    Ok((m.a * z + m.b) / den)
}

/// The iTrace functional `(a - d) / (2i)`.
pub fn itrace(m: &Mat2C) -> Complex64 {
    (m.a - m.d) / (2.0 * I)
}

/// `Itr(R^{-1} M R)`, which coincides with `itrace(M)` for every rotation.
pub fn itrace_rotation_conjugation_invariant(m: &Mat2C, r: &RotationElement) -> Complex64 {
    let rm = r.matrix();
    itrace(&(rm.inverse() * *m * rm))
}

/// `M_xi = (1 - |xi|^2)^{-1/2} [[1, xi], [conj xi, 1]]`, the disk automorphism
/// sending zero to `xi`.
pub fn conjugator_from_fixed_point(xi: DiskPoint) -> SU11Element {
    let x = xi.value();
    let s = 1.0 / (1.0 - x.norm_sqr()).sqrt();
    SU11Element { p: c(s, 0.0), q: x * s }
}

/// The unique fixed point in the disk of an elliptic element.
///
/// The fixed points solve `conj(q) xi^2 + (conj p - p) xi - q = 0`; writing
/// `s = sqrt(1 - (Re p)^2)` the roots are `i (Im p +- s) / conj(q)`, whose
/// product has modulus one. The root outside the disk is formed without
/// cancellation and the inside root is recovered from the product, which
/// stays well defined as `q -> 0`.
pub fn elliptic_fixed_point(a: &SU11Element) -> Result<DiskPoint> {
    if !a.is_elliptic() {
        return Err(Error::NotElliptic(a.trace().abs()));
    }
    let p = a.p();
    let s = (1.0 - p.re * p.re).max(0.0).sqrt();
    let sign = if p.im >= 0.0 { 1.0 } else { -1.0 };
    let big = p.im + sign * s;
    // big != 0 because s > 0 for elliptic input.
    let xi = I * a.q() / big;
    DiskPoint::new(xi)
}

/// Returns `(M, theta)` with `M^{-1} A M = R_theta` and `M = M_xi`.
///
/// `theta` is the signed rotation angle in `(-pi, pi]`; its modulus is
/// `arccos(tr A / 2)`. Elements of SU(1,1) conjugate to `R_theta` and
/// `R_{-theta}` are not conjugate to each other, so the sign is part of the
/// answer.
pub fn conjugate_to_rotation(a: &SU11Element) -> Result<(SU11Element, f64)> {
    let xi = elliptic_fixed_point(a)?;
    let m = conjugator_from_fixed_point(xi);
    let r = m.inverse().matrix() * a.matrix() * m.matrix();
    Ok((m, r.a.arg()))
}

/// Squared Hilbert-Schmidt norm.
pub fn hs_norm_sq(m: &Mat2C) -> f64 {
    m.a.norm_sqr() + m.b.norm_sqr() + m.c.norm_sqr() + m.d.norm_sqr()
}

/// `Itr(M_xi^{-1} A M_xi)` for `A = [[i w, z], [conj z, -i w]]` in su(1,1).
pub fn itrace_conjugated_su11lie(xi: DiskPoint, w: f64, z: Complex64) -> f64 {
    let x = xi.value();
    let r2 = x.norm_sqr();
    ((1.0 + r2) * w + 2.0 * (z * x.conj()).im) / (1.0 - r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn m_xi(xi: Complex64) -> SU11Element {
        conjugator_from_fixed_point(DiskPoint::new(xi).unwrap())
    }

    #[test]
    fn mobius_examples() {
        let z = c(0.3, 0.1);
        assert_eq!(mobius_apply(&Mat2C::identity(), z).unwrap(), z);
        let r = RotationElement::new(PI / 4.0).matrix();
        assert!(close(mobius_apply(&r, c(0.5, 0.0)).unwrap(), c(0.0, 0.5), 1e-15));
        let m = m_xi(c(0.4, 0.0)).matrix();
        assert!(close(mobius_apply(&m, c(0.0, 0.0)).unwrap(), c(0.4, 0.0), 1e-15));
    }

    #[test]
    fn mobius_pole() {
        let m = Mat2C::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0));
        assert!(matches!(mobius_apply(&m, c(1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn itrace_examples() {
        assert!(close(itrace(&Mat2C::diag(I, -I)), c(1.0, 0.0), 1e-15));
        assert_eq!(itrace(&Mat2C::identity()), c(0.0, 0.0));
        let m = Mat2C::new(c(0.0, 2.0), c(5.0, 0.0), c(7.0, 0.0), c(0.0, -4.0));
        assert!(close(itrace(&m), c(3.0, 0.0), 1e-15));
        let swap = Mat2C::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let v = itrace_rotation_conjugation_invariant(&swap, &RotationElement::new(PI / 3.0));
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn conjugator_examples() {
        assert_eq!(m_xi(c(0.0, 0.0)).matrix(), Mat2C::identity());
        let m = m_xi(c(0.6, 0.0)).matrix();
        let expect = Mat2C::new(c(1.25, 0.0), c(0.75, 0.0), c(0.75, 0.0), c(1.25, 0.0));
        assert!(m.dist_inf(&expect) < 1e-15);
        assert!((hs_norm_sq(&m) - 4.25).abs() < 1e-14);
    }

    #[test]
    fn fixed_point_examples() {
        let r = RotationElement::new(0.7).to_su11();
        assert_eq!(elliptic_fixed_point(&r).unwrap().value(), c(0.0, 0.0));

        let xi = c(0.3, 0.2);
        let m = m_xi(xi);
        let a = m.compose(&RotationElement::new(1.0).to_su11()).compose(&m.inverse());
        let got = elliptic_fixed_point(&a).unwrap().value();
        assert!(close(got, xi, 1e-14), "{got}");
    }

    #[test]
    fn fixed_point_rejects_hyperbolic() {
        let h = SU11Element::new(c(2.0, 0.0), c(3f64.sqrt(), 0.0)).unwrap();
        assert!(matches!(elliptic_fixed_point(&h), Err(Error::NotElliptic(_))));
        let parabolic = SU11Element::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(elliptic_fixed_point(&parabolic).is_err());
    }

    #[test]
    fn certification_rejects_drift() {
        assert!(SU11Element::new(c(1.0, 0.0), c(0.1, 0.0)).is_err());
        let bad = Mat2C::new(c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0));
        assert!(SU11Element::from_mat(&bad).is_err());
    }

    #[test]
    fn conjugate_rotation_identity_case() {
        let (m, theta) = conjugate_to_rotation(&RotationElement::new(0.5).to_su11()).unwrap();
        assert!(m.matrix().dist_inf(&Mat2C::identity()) < 1e-15);
        assert!((theta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn itrace_lie_examples() {
        let z = c(0.3, -0.8);
        assert!((itrace_conjugated_su11lie(DiskPoint::zero(), 1.7, z) - 1.7).abs() < 1e-15);
        let v = itrace_conjugated_su11lie(DiskPoint::new(c(0.5, 0.0)).unwrap(), 1.0, c(0.0, 0.0));
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
    }
}
