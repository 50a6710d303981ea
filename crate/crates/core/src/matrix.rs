//! Complex 2×2 matrices.
//!
//! Only what the transfer-matrix machinery needs: products, determinants,
//! eigenvalues, and the exponential in a general (scaling and squaring)
//! and a closed traceless form.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Number of Taylor terms used after scaling.
const TAYLOR_TERMS: usize = 18;
/// Norm bound the argument is scaled under before the Taylor series.
const SCALED_NORM: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2c {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Default for Mat2c {
    fn default() -> Self {
        Self::zero()
    }
}

impl Mat2c {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn from_entries(e: [Complex64; 4]) -> Self {
        Self::new(e[0], e[1], e[2], e[3])
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a11.conj(), self.a12.conj(), self.a21.conj(), self.a22.conj())
    }

    /// Inverse by the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == ZERO {
            return None;
        }
        let inv = d.inv();
        Some(Self::new(self.a22 * inv, -self.a12 * inv, -self.a21 * inv, self.a11 * inv))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Eigenvalues `tr/2 ± sqrt(((a11 − a22)/2)² + a12·a21)`.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let half_tr = self.trace() * 0.5;
        let half_gap = (self.a11 - self.a22) * 0.5;
        let disc = (half_gap * half_gap + self.a12 * self.a21).sqrt();
        (half_tr + disc, half_tr - disc)
    }

    /// Matrix exponential by scaling and squaring with a truncated Taylor series.
    pub fn exp(&self) -> Self {
        let norm = self.norm();
        let mut squarings = 0u32;
        if norm > SCALED_NORM {
            squarings = (norm / SCALED_NORM).log2().ceil() as u32;
        }
        let scaled = self.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));

        // Horner form of I + A(I + A/2(I + A/3(...)))
        let mut acc = Self::identity();
        for n in (1..=TAYLOR_TERMS).rev() {
            acc = Self::identity() + (scaled * acc).scale(Complex64::new(1.0 / n as f64, 0.0));
        }
        for _ in 0..squarings {
            acc = acc * acc;
        }
        acc
    }

    /// Closed-form exponential of a traceless matrix,
    /// `cosh(λ)·I + (sinh(λ)/λ)·M` with `λ² = a11² + a12·a21`.
    pub fn exp_traceless(&self) -> Result<Self> {
        let trace = self.trace().norm();
        if trace > 1e-12 * self.norm() {
            return Err(Error::NotTraceless { trace });
        }
        let lambda = (self.a11 * self.a11 + self.a12 * self.a21).sqrt();
        let (cosh, sinhc) = cosh_sinhc(lambda);
        Ok(Self::identity().scale(cosh) + self.scale(sinhc))
    }
}

/// `(cosh λ, sinh(λ)/λ)`, with a short series near the removable singularity.
pub(crate) fn cosh_sinhc(lambda: Complex64) -> (Complex64, Complex64) {
    if lambda.norm() < 1e-6 {
        let l2 = lambda * lambda;
        let l4 = l2 * l2;
        (ONE + l2 / 2.0 + l4 / 24.0, ONE + l2 / 6.0 + l4 / 120.0)
    } else {
        (lambda.cosh(), lambda.sinh() / lambda)
    }
}

impl Add for Mat2c {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2c {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2c {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for Mat2c {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Raw power series, summed until the terms underflow the tolerance.
    fn series_exp(m: &Mat2c, terms: usize) -> Mat2c {
        let mut sum = Mat2c::identity();
        let mut term = Mat2c::identity();
        for n in 1..terms {
            term = (term * *m).scale(c(1.0 / n as f64, 0.0));
            sum = sum + term;
        }
        sum
    }

    fn arb_mat(scale: f64) -> impl Strategy<Value = Mat2c> {
        proptest::array::uniform8(-1.0f64..1.0).prop_map(move |v| {
            Mat2c::new(
                c(v[0], v[1]).scale(scale),
                c(v[2], v[3]).scale(scale),
                c(v[4], v[5]).scale(scale),
                c(v[6], v[7]).scale(scale),
            )
        })
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(Mat2c::zero().exp(), Mat2c::identity());
        assert_eq!(Mat2c::zero().exp_traceless().unwrap(), Mat2c::identity());
    }

    #[test]
    fn exp_of_diagonal() {
        let z = c(0.3, 0.7);
        let e = Mat2c::diag(z, -z).exp();
        let expected = Mat2c::diag(z.exp(), (-z).exp());
        assert!(e.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn traceless_rotation() {
        let theta = 1.0;
        let m = Mat2c::diag(c(0.0, theta), c(0.0, -theta));
        let e = m.exp_traceless().unwrap();
        let expected = Mat2c::diag(c(0.0, theta).exp(), c(0.0, -theta).exp());
        assert!(e.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn traceless_rejects_trace() {
        let m = Mat2c::diag(c(1.0, 0.0), c(0.5, 0.0));
        assert!(matches!(m.exp_traceless(), Err(Error::NotTraceless { .. })));
    }

    #[test]
    fn traceless_small_lambda_series() {
        let m = Mat2c::new(c(0.0, 3e-8), c(1e-8, 0.0), c(-2e-8, 0.0), c(0.0, -3e-8));
        let e = m.exp_traceless().unwrap();
        assert!(e.max_abs_diff(&series_exp(&m, 10)) < 1e-15);
    }

    #[test]
    fn eigenvalues_simple() {
        let (a, b) = Mat2c::diag(c(2.0, 0.0), c(5.0, 0.0)).eigenvalues();
        let mut v = [a.re, b.re];
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(v, [2.0, 5.0]);

        let (a, bb, cc) = (c(0.4, -0.2), c(1.1, 0.3), c(-0.7, 0.5));
        let m = Mat2c::new(a, bb, cc, -a);
        let (l1, l2) = m.eigenvalues();
        let root = (a * a + bb * cc).sqrt();
        assert!((l1 - root).norm() < 1e-14);
        assert!((l2 + root).norm() < 1e-14);
    }

    #[test]
    fn identity_and_inverse() {
        let x = Mat2c::new(c(1.0, 2.0), c(-0.5, 0.1), c(0.3, 0.0), c(2.0, -1.0));
        assert_eq!(Mat2c::identity() * x, x);
        let inv = x.inverse().unwrap();
        assert!((inv * x).max_abs_diff(&Mat2c::identity()) < 1e-14);
        assert!(Mat2c::zero().inverse().is_none());
    }

    #[test]
    fn non_commuting_exponentials_differ() {
        let a = Mat2c::from_real(0.0, 1.0, 0.0, 0.0);
        let b = Mat2c::from_real(0.0, 0.0, 1.0, 0.0);
        let lhs = (a + b).exp();
        let rhs = a.exp() * b.exp();
        assert!(lhs.max_abs_diff(&rhs) > 1e-3);
    }

    proptest! {
        #[test]
        fn product_algebra(a in arb_mat(2.0), b in arb_mat(2.0), cm in arb_mat(2.0)) {
            let det_err = ((a * b).det() - a.det() * b.det()).norm();
            prop_assert!(det_err < 1e-12 * (1.0 + a.det().norm() * b.det().norm()));
            prop_assert!(((a * b) * cm).max_abs_diff(&(a * (b * cm))) < 1e-12 * 64.0);
        }

        #[test]
        fn exp_matches_raw_series(m in arb_mat(5.0 / 8f64.sqrt())) {
            // ‖m‖_F ≈ 5 on average for this box
            let reference = series_exp(&m, 200);
            let scale = 1.0f64.max(reference.norm());
            prop_assert!(m.exp().max_abs_diff(&reference) < 1e-10 * scale);
        }

        #[test]
        fn det_exp_is_exp_trace(m in arb_mat(10.0 / 8f64.sqrt())) {
            let lhs = m.exp().det();
            let rhs = m.trace().exp();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
        }

        #[test]
        fn exp_inverse_is_exp_negative(m in arb_mat(10.0 / 8f64.sqrt())) {
            let prod = m.exp() * (-m).exp();
            prop_assert!(prod.max_abs_diff(&Mat2c::identity()) < 1e-10 * (1.0 + m.exp().norm() * (-m).exp().norm()) / 2.0 + 1e-10);
        }

        #[test]
        fn spectral_mapping(m in arb_mat(3.0)) {
            let (l1, l2) = m.eigenvalues();
            let (mu1, mu2) = m.exp().eigenvalues();
            let (e1, e2) = (l1.exp(), l2.exp());
            let direct = (mu1 - e1).norm().max((mu2 - e2).norm());
            let swapped = (mu1 - e2).norm().max((mu2 - e1).norm());
            let scale = 1.0f64.max(e1.norm()).max(e2.norm());
            prop_assert!(direct.min(swapped) < 1e-10 * scale);
        }

        #[test]
        fn vieta(m in arb_mat(3.0)) {
            let (l1, l2) = m.eigenvalues();
            prop_assert!((l1 + l2 - m.trace()).norm() < 1e-12 * (1.0 + m.norm()));
            prop_assert!((l1 * l2 - m.det()).norm() < 1e-12 * (1.0 + m.norm() * m.norm()));
        }

        #[test]
        fn traceless_closed_form_matches_series_exp(v in proptest::array::uniform6(-1.5f64..1.5)) {
            let a = c(v[0], v[1]);
            let m = Mat2c::new(a, c(v[2], v[3]), c(v[4], v[5]), -a);
            let closed = m.exp_traceless().unwrap();
            prop_assert!(closed.max_abs_diff(&m.exp()) < 1e-12 * (1.0 + closed.norm()));
        }
    }
}
