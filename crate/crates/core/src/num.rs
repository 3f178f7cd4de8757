//! Arbitrary-precision complex arithmetic and the precision context shared by
//! every numerical routine.
//!
//! Complex numbers are a pair of MPFR floats. Only the handful of elementary
//! functions the rest of the crate needs are provided; all of them use the
//! principal branch.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// Working precision, tolerances and budgets for a numerical evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    /// Mantissa bits of every MPFR float.
    pub prec: u32,
    /// Absolute tolerance the caller wants on the final value.
    pub tol: f64,
    /// Maximum refinement level of the double-exponential quadrature
    /// (level `k` uses step `2^-k`).
    pub max_quad_level: u32,
    /// Angle of the lateral Laplace rays, in radians, strictly inside (0, pi/2).
    pub ray_angle: f64,
    /// Hard cap on the number of directly summed terms of any l-series.
    pub ell_cap: usize,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            prec: 128,
            tol: 1e-8,
            max_quad_level: 9,
            ray_angle: std::f64::consts::FRAC_PI_4,
            ell_cap: 200_000,
        }
    }
}

impl PrecisionContext {
    pub fn new(prec: u32, tol: f64) -> Self {
        Self {
            prec,
            tol,
            ..Self::default()
        }
    }

    pub fn with_tol(&self, tol: f64) -> Self {
        Self {
            tol,
            ..self.clone()
        }
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            prec,
            ..self.clone()
        }
    }

    pub fn f(&self, v: f64) -> Float {
        Float::with_val(self.prec, v)
    }

    pub fn q(&self, r: &Rational) -> Float {
        Float::with_val(self.prec, r)
    }

    pub fn int(&self, v: i64) -> Float {
        Float::with_val(self.prec, v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec, Constant::Pi)
    }

    pub fn sqrt_pi(&self) -> Float {
        self.pi().sqrt()
    }

    /// `2^-prec` scaled by `magnitude`: the rounding floor of a computation of that size.
    pub fn ulp(&self, magnitude: f64) -> f64 {
        magnitude.abs().max(1.0) * 2f64.powi(-(self.prec.min(1000) as i32))
    }

    /// Natural-log size of the tolerance, `ln(1/tol)`, floored at 10.
    pub fn log_inv_tol(&self) -> f64 {
        (-self.tol.ln()).max(10.0)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.prec < 53 {
            return Err(crate::Error::InvalidConfig(format!(
                "precision {} bits is below the 53-bit floor",
                self.prec
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(crate::Error::InvalidConfig(format!(
                "tolerance {} must be positive",
                self.tol
            )));
        }
        let theta = self.ray_angle;
        if !(theta > 1e-3 && theta < std::f64::consts::FRAC_PI_2 - 1e-3) {
            return Err(crate::Error::InvalidConfig(format!(
                "ray angle {theta} must lie strictly inside (0, pi/2)"
            )));
        }
        Ok(())
    }
}

/// Complex number with MPFR components.
#[derive(Clone, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "({re:e} {im:+e}i)")
    }
}

impl Cx {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::new(Float::with_val(prec, 1), Float::new(prec))
    }

    pub fn i(prec: u32) -> Self {
        Self::new(Float::new(prec), Float::with_val(prec, 1))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), Float::with_val(self.prec(), -&self.im))
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re * s),
            Float::with_val(p, &self.im * s),
        )
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        self.scale(&Float::with_val(self.prec(), s))
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self::new(Float::with_val(self.prec(), -&self.im), self.re.clone())
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.clone().square() + self.im.clone().square())
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re / &n),
            Float::with_val(p, -(Float::with_val(p, &self.im / &n))),
        )
    }

    /// `e^{i theta}` for real `theta`.
    pub fn cis(theta: &Float) -> Self {
        let p = theta.prec();
        let (s, c) = theta.clone().sin_cos(Float::new(p));
        Self::new(c, s)
    }

    /// `e^{2 pi i num/den}` with the fraction reduced mod 1 exactly before
    /// the angle is formed.
    pub fn root_of_unity(num: i64, den: u64, prec: u32) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let d = den as i128;
        let mut r = (num as i128).rem_euclid(d);
        if 2 * r > d {
            r -= d;
        }
        if r == 0 {
            return Self::one(prec);
        }
        if 2 * r == d {
            return Self::real(Float::with_val(prec, -1));
        }
        if 4 * r == d {
            return Self::i(prec);
        }
        if 4 * r == -d {
            return Self::i(prec).neg_ref();
        }
        let angle = Float::with_val(prec + 16, Constant::Pi) * 2i32 * Float::with_val(prec + 16, r)
            / Float::with_val(prec + 16, d);
        Self::cis(&angle).with_prec(prec)
    }

    pub fn neg_ref(&self) -> Self {
        let p = self.prec();
        Self::new(
            Float::with_val(p, -&self.re),
            Float::with_val(p, -&self.im),
        )
    }

    pub fn exp(&self) -> Self {
        let m = self.re.clone().exp();
        Self::cis(&self.im).scale(&m)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        Self::new(self.abs().ln(), Float::with_val(p, self.arg()))
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        // sqrt((r + |re|)/2) is computed without cancellation.
        let t = Float::with_val(p, (Float::with_val(p, &r + self.re.clone().abs())) / 2u32).sqrt();
        let half_im_over_t = Float::with_val(p, &self.im / &t) / 2u32;
        if self.re >= 0 {
            Self::new(t, half_im_over_t)
        } else {
            let re = half_im_over_t.abs();
            let im = if self.im.is_sign_negative() {
                Float::with_val(p, -&t)
            } else {
                t
            };
            Self::new(re, im)
        }
    }

    /// Principal power `exp(e * Log z)`.
    pub fn powf(&self, e: &Float) -> Self {
        if self.is_zero() {
            return Self::zero(self.prec());
        }
        let l = self.ln();
        l.scale(e).exp()
    }

    /// Power `exp(e * log z)` where `log z` takes the argument `arg` supplied
    /// by the caller (used to pick a side of a branch cut).
    pub fn powf_with_arg(&self, e: &Float, arg: &Float) -> Self {
        let p = self.prec();
        let l = Self::new(self.abs().ln(), Float::with_val(p, arg));
        l.scale(e).exp()
    }

    pub fn powi(&self, n: i32) -> Self {
        let p = self.prec();
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one(p);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn dist(&self, other: &Cx) -> f64 {
        (self - other).abs_f64()
    }
}

impl<'a> Add<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        let p = self.prec().max(o.prec());
        Cx::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }
}

impl<'a> Sub<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        let p = self.prec().max(o.prec());
        Cx::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }
}

impl<'a> Mul<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        let p = self.prec().max(o.prec());
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Cx::new(re, im)
    }
}

impl<'a> Div<&'a Cx> for &'a Cx {
    type Output = Cx;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Cx) -> Cx {
        self * &o.recip()
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx::new(-self.re, -self.im)
    }
}

impl Add for Cx {
    type Output = Cx;
    fn add(self, o: Cx) -> Cx {
        &self + &o
    }
}

impl Sub for Cx {
    type Output = Cx;
    fn sub(self, o: Cx) -> Cx {
        &self - &o
    }
}

impl Mul for Cx {
    type Output = Cx;
    fn mul(self, o: Cx) -> Cx {
        &self * &o
    }
}

/// A numerical value with an absolute error estimate.
#[derive(Debug, Clone)]
pub struct Approx {
    pub value: Cx,
    pub err: f64,
}

impl Approx {
    pub fn new(value: Cx, err: f64) -> Self {
        Self { value, err }
    }
}

/// Exact rational to float.
pub fn rat_to_float(r: &Rational, prec: u32) -> Float {
    Float::with_val(prec, r)
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Rising factorial `(x)_n` of a rational.
pub fn rising(x: &Rational, n: u32) -> Rational {
    let mut acc = Rational::from(1);
    for k in 0..n {
        acc *= Rational::from(x + k);
    }
    acc
}

/// `|z|` bound on the magnitude of `base^k` for deciding truncation.
pub fn pow_f64(base: f64, k: i32) -> f64 {
    base.powi(k)
}

/// Sum floats with a fixed pairwise tree so the result does not depend on
/// how the terms were produced.
pub fn pairwise_sum(terms: &[Cx], prec: u32) -> Cx {
    match terms.len() {
        0 => Cx::zero(prec),
        1 => terms[0].clone(),
        n => {
            let (a, b) = terms.split_at(n / 2);
            &pairwise_sum(a, prec) + &pairwise_sum(b, prec)
        }
    }
}

/// `Float::pow` for an unsigned exponent, at the float's precision.
pub fn fpow(x: &Float, k: u32) -> Float {
    Float::with_val(x.prec(), x.pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_is_principal_on_both_sides_of_the_cut() {
        let p = 128;
        let above = Cx::from_f64(p, -4.0, 1e-30).sqrt();
        let below = Cx::from_f64(p, -4.0, -1e-30).sqrt();
        assert!((above.im.to_f64() - 2.0).abs() < 1e-12);
        assert!((below.im.to_f64() + 2.0).abs() < 1e-12);
        let z = Cx::from_f64(p, 3.0, -4.0);
        let s = z.sqrt();
        assert!(s.dist(&Cx::from_f64(p, 2.0, -1.0)) < 1e-30);
    }

    #[test]
    fn roots_of_unity_are_exact_at_quarter_turns() {
        let p = 128;
        assert_eq!(Cx::root_of_unity(3, 4, p), Cx::i(p).neg_ref());
        assert_eq!(Cx::root_of_unity(-7, 2, p), Cx::real(Float::with_val(p, -1)));
        let z = Cx::root_of_unity(1, 12, p);
        assert!((z.powi(12).dist(&Cx::one(p))) < 1e-35);
    }

    #[test]
    fn powf_matches_repeated_multiplication() {
        let p = 128;
        let z = Cx::from_f64(p, 0.3, -1.7);
        let e = Float::with_val(p, 3);
        assert!(z.powf(&e).dist(&z.powi(3)) < 1e-35);
        assert!(z.powi(-2).dist(&(&z * &z).recip()) < 1e-35);
    }

    #[test]
    fn exp_ln_round_trip() {
        let p = 160;
        let z = Cx::from_f64(p, -0.25, 2.5);
        assert!(z.ln().exp().dist(&z) < 1e-40);
    }
}
