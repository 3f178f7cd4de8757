//! Borel transform `B[F](p) = C_M delta + G(p)` of the formal series: exact
//! Taylor coefficients, the Hadamard-product factorisation, the closed form
//! `G(p) = (3 pi c/(M^2 b)) sum_l l f~(l) / (l^2 pi^2/M^2 - p/b)^{5/2}` and its
//! singularity set.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::dirichlet::PeriodicSeries;
use crate::exact::{bernoulli_sum, FormalSeries};
use crate::num::{factorial, pairwise_sum, rat_to_float, rising, Approx, Cx, PrecisionContext};
use crate::periodic::{gcd, TildeFunction};
use crate::{Error, Result};

/// Which side of a cut ray a point on it is approached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `p + i0`, the ray rotated counter-clockwise.
    Plus,
    /// `p - i0`.
    Minus,
}

impl Side {
    pub fn sign(self) -> i32 {
        match self {
            Side::Plus => 1,
            Side::Minus => -1,
        }
    }
}

/// `G(p) = sum_n g_n p^n` with `g_n = a_{n+1} / n!`.
pub fn borel_coefficients(series: &FormalSeries, count: usize) -> Result<Vec<Rational>> {
    let series = ensure_len(series, count + 1)?;
    Ok((0..count)
        .map(|n| series.a(n + 1) / factorial(n as u32))
        .collect())
}

fn ensure_len(series: &FormalSeries, len: usize) -> Result<FormalSeries> {
    if series.len() >= len {
        Ok(series.clone())
    } else {
        series.with_count(len)
    }
}

/// Second form of the coefficients:
/// `M (-1)^n sum_m f(m) B_{2n+4}(m/M)/(2n+4)! * (2n+3)!/(n!(n+1)!) * (M^2/b)^{n+1}`.
pub fn bernoulli_form_coefficients(series: &FormalSeries, count: usize) -> Vec<Rational> {
    let f = series.f();
    let m = Integer::from(f.modulus());
    let b = Integer::from(series.b());
    (0..count)
        .map(|n| {
            let n32 = n as u32;
            let s = bernoulli_sum(f, 2 * n + 4);
            let ratio = Rational::from((factorial(2 * n32 + 3), factorial(n32) * factorial(n32 + 1)));
            let scale = Rational::from((m.clone().pow(2 * n32 + 2), b.clone().pow(n32 + 1)));
            let mut v = s / factorial(2 * n32 + 4) * ratio * scale * &m;
            if n % 2 == 1 {
                v = -v;
            }
            v
        })
        .collect()
}

/// Taylor coefficients of the two Hadamard factors and their termwise product.
#[derive(Debug, Clone)]
pub struct HadamardCoefficients {
    /// `M^3 sum_m f(m) B_{2n+4}(m/M)/(2n+4)! (-M^2)^n`.
    pub g1: Vec<Rational>,
    /// `(2n+3)!/(n!(n+1)!) b^{-(n+1)}`, the coefficients of `(6/b)(1 - 4p/b)^{-5/2}`.
    pub g2: Vec<Rational>,
    pub product: Vec<Rational>,
}

pub const HADAMARD_MAX: usize = 40;

/// Rebuild the Borel coefficients as `g1 (.) g2` and require exact agreement
/// with [`borel_coefficients`].
pub fn hadamard_oracle(series: &FormalSeries, count: usize) -> Result<HadamardCoefficients> {
    if count > HADAMARD_MAX {
        return Err(Error::InvalidConfig(format!(
            "Hadamard oracle is limited to {HADAMARD_MAX} coefficients, got {count}"
        )));
    }
    let f = series.f();
    let m = Integer::from(f.modulus());
    let b = Integer::from(series.b());
    let m2 = Integer::from(m.square_ref());
    let mut g1 = Vec::with_capacity(count);
    let mut g2 = Vec::with_capacity(count);
    for n in 0..count {
        let n32 = n as u32;
        let s = bernoulli_sum(f, 2 * n + 4) / factorial(2 * n32 + 4);
        let mut pow = m2.clone().pow(n32);
        if n % 2 == 1 {
            pow = -pow;
        }
        g1.push(s * m.clone().pow(3) * pow);
        let num = factorial(2 * n32 + 3);
        let den = factorial(n32) * factorial(n32 + 1) * b.clone().pow(n32 + 1);
        g2.push(Rational::from((num, den)));
    }
    let product: Vec<Rational> = g1.iter().zip(&g2).map(|(a, b)| Rational::from(a * b)).collect();
    let direct = borel_coefficients(series, count)?;
    if let Some(n) = (0..count).find(|&n| product[n] != direct[n]) {
        return Err(Error::Consistency(format!(
            "Hadamard coefficient {n} is {} but the Borel coefficient is {}",
            product[n], direct[n]
        )));
    }
    Ok(HadamardCoefficients { g1, g2, product })
}

/// Coefficients of the binomial series of `(6/b)(1 - 4p/b)^{-5/2}`.
pub fn g2_binomial_series(b: i64, count: usize) -> Vec<Rational> {
    let b = Integer::from(b);
    (0..count)
        .map(|n| {
            let n32 = n as u32;
            let r = rising(&Rational::from((5, 2)), n32) / factorial(n32);
            let four = Rational::from((Integer::from(4).pow(n32), b.clone().pow(n32)));
            r * four * Rational::from((6, b.clone()))
        })
        .collect()
}

/// `{b l^2 pi^2 / M^2 : l >= 1, f~(l) != 0}`.
#[derive(Debug, Clone)]
pub struct SingularitySet {
    b: i64,
    tilde: TildeFunction,
}

impl SingularitySet {
    pub fn tilde(&self) -> &TildeFunction {
        &self.tilde
    }

    /// Indices `l` of the first `count` singularities, increasing.
    pub fn first(&self, count: usize) -> Vec<i64> {
        (1..).filter(|&l| !self.tilde.is_zero(l)).take(count).collect()
    }

    pub fn contains_index(&self, l: i64) -> bool {
        l >= 1 && !self.tilde.is_zero(l)
    }

    /// `b l^2 pi^2 / M^2`.
    pub fn point(&self, l: i64, prec: u32) -> Float {
        let m = self.tilde.base().modulus() as i64;
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        let pi2 = Float::with_val(prec, pi.square_ref());
        pi2 * Rational::from((self.b * l * l, m * m))
    }

    /// `b l^2 / M^2` as an exact rational (the point divided by `pi^2`).
    pub fn point_over_pi2(&self, l: i64) -> Rational {
        let m = self.tilde.base().modulus() as i64;
        Rational::from((self.b * l * l, m * m))
    }

    pub fn min(&self, prec: u32) -> Float {
        self.point(self.tilde.first_support(), prec)
    }

    /// Indices where the divisibility disjunction
    /// `M/gcd(M, k2-k1) does not divide l  or  M/gcd(M, M-k1-k2) does not divide l`
    /// predicts a pole but the closed-form term vanishes.
    pub fn disjunction_disagreements(&self, up_to: i64) -> Vec<i64> {
        let f = self.tilde.base();
        let m = f.modulus() as i64;
        let d1 = m / gcd(m, f.k2() - f.k1());
        let d2 = m / gcd(m, m - f.k1() - f.k2());
        (1..=up_to)
            .filter(|&l| (l % d1 != 0 || l % d2 != 0) && self.tilde.is_zero(l))
            .collect()
    }
}

pub fn singularity_set(series: &FormalSeries) -> SingularitySet {
    SingularitySet {
        b: series.b(),
        tilde: series.f().tilde(),
    }
}

/// Closed form of `G` as a sum over the singularities.
#[derive(Debug, Clone)]
pub struct BorelClosedForm {
    series: FormalSeries,
    sing: SingularitySet,
}

impl BorelClosedForm {
    pub fn new(series: &FormalSeries) -> Self {
        Self {
            series: series.clone(),
            sing: singularity_set(series),
        }
    }

    pub fn series(&self) -> &FormalSeries {
        &self.series
    }

    pub fn singularities(&self) -> &SingularitySet {
        &self.sing
    }

    fn modulus(&self) -> i64 {
        self.series.f().modulus() as i64
    }

    /// `3 pi c / (M^2 b)`.
    pub fn prefactor(&self, prec: u32) -> Float {
        let m = self.modulus();
        let r = Rational::from(self.series.f().c() * 3i32) / Integer::from(m * m * self.series.b());
        Float::with_val(prec, rug::float::Constant::Pi) * r
    }

    /// `f~` over one period, as Dirichlet coefficients.
    pub fn tilde_series(&self, prec: u32) -> PeriodicSeries {
        PeriodicSeries::new(self.sing.tilde.period_values(prec), prec)
    }

    /// Taylor coefficient of `p^n` obtained by expanding each closed-form term:
    /// `K (5/2)_n/(n! b^n) (M/pi)^{5+2n} L(2n+4, f~)`.
    pub fn taylor_coefficient(&self, n: u32, prec: u32) -> Float {
        let wp = prec + 32;
        let tilde = self.tilde_series(wp);
        let m = self.modulus();
        let pi = Float::with_val(wp, rug::float::Constant::Pi);
        let m_over_pi = Float::with_val(wp, m) / &pi;
        let r = rising(&Rational::from((5, 2)), n) / factorial(n) / Integer::from(self.series.b()).pow(n);
        let l = tilde.sum(2 * n + 4);
        let v = self.prefactor(wp) * rat_to_float(&r, wp) * m_over_pi.pow(5 + 2 * n) * l;
        Float::with_val(prec, v)
    }

    /// Evaluate `G(p)`. Points on the positive real axis beyond the first
    /// singularity lie on cuts and need a side.
    pub fn eval(&self, p: &Cx, side: Option<Side>, ctx: &PrecisionContext) -> Result<Approx> {
        let prec = ctx.prec;
        let wp = prec + 24;
        let p = p.with_prec(wp);
        let pf = p.to_f64();
        let min = self.sing.min(wp);
        let guard = 1e-6 * min.to_f64();
        let m = self.modulus();
        let b = self.series.b();
        let pi = Float::with_val(wp, rug::float::Constant::Pi);
        // nearest singularity index around |p|
        let l_near = ((pf.0.max(0.0) / b as f64).sqrt() * m as f64 / std::f64::consts::PI).round() as i64;
        for l in (l_near - 2).max(1)..=l_near + 2 {
            if self.sing.contains_index(l) {
                let s = self.sing.point(l, wp);
                let d = Cx::new(Float::with_val(wp, &p.re - &s), p.im.clone()).abs_f64();
                if d < guard {
                    return Err(Error::SingularProximity {
                        point: format!("{} + {}i", pf.0, pf.1),
                        singularity: format!("{} (l = {l})", s.to_f64()),
                        guard,
                    });
                }
            }
        }
        let on_cut = p.im.is_zero() && p.re > min;
        let side = match (on_cut, side) {
            (true, None) => {
                return Err(Error::BranchAmbiguity(format!(
                    "p = {} lies on the cut beyond the first singularity {}",
                    pf.0,
                    min.to_f64()
                )))
            }
            (true, s) => s,
            (false, _) => None,
        };
        let period = self.sing.tilde.period() as i64;
        // direct range: b A_L >= 4|p|
        let l_min = (m as f64 / std::f64::consts::PI) * (4.0 * p.abs_f64() / b as f64).sqrt();
        let blocks = ((l_min.max(1.0)) / period as f64).ceil().max(1.0) as i64;
        let big_l = blocks * period;
        let pb = p.scale(&Float::with_val(wp, b).recip());
        let five_halves = Float::with_val(wp, -2.5);
        let m2 = m * m;
        let terms: Vec<Cx> = (1..=big_l)
            .into_par_iter()
            .filter(|&l| !self.sing.tilde.is_zero(l))
            .map(|l| {
                let a = Float::with_val(wp, pi.square_ref()) * Rational::from((l * l, m2));
                let w = Cx::new(a - &pb.re, Float::with_val(wp, -&pb.im));
                let pow = match side {
                    Some(s) if w.im.is_zero() && w.re.is_sign_negative() => {
                        // p +- i0 puts w just below/above the negative axis
                        let arg = Float::with_val(wp, &pi * -s.sign());
                        w.powf_with_arg(&five_halves, &arg)
                    }
                    _ => w.powf(&five_halves),
                };
                let coef = self.sing.tilde.value(l, wp) * l;
                pow.scale(&coef)
            })
            .collect();
        let direct = pairwise_sum(&terms, wp);
        let tilde = self.tilde_series(wp);
        let (tail, tail_err) = self.tail(&tilde, &p, big_l as u64, wp);
        let total = (direct + tail).scale(&self.prefactor(wp));
        let scale = total.abs_f64().max(1e-300);
        let err = tail_err * self.prefactor(64).to_f64().abs() + scale * 2f64.powi(-(prec as i32));
        Ok(Approx::new(total.with_prec(prec), err))
    }

    /// `sum_{l>L} l f~(l) (A_l - p/b)^{-5/2}` via the binomial expansion in
    /// `p/(b A_l)` and periodic Dirichlet tails.
    fn tail(&self, tilde: &PeriodicSeries, p: &Cx, big_l: u64, wp: u32) -> (Cx, f64) {
        let m = self.modulus();
        let b = self.series.b();
        let pi = Float::with_val(wp, rug::float::Constant::Pi);
        let m_over_pi = Float::with_val(wp, m) / &pi;
        let m_over_pi2 = Float::with_val(wp, m_over_pi.square_ref());
        let pb = p.scale(&Float::with_val(wp, b).recip());
        let a_l = (pi.to_f64() * big_l as f64 / m as f64).powi(2);
        let ratio = pb.abs_f64() / a_l;
        let base = m_over_pi.to_f64().powi(5) / (big_l as f64).powi(3);
        let eps = 2f64.powi(-(wp as i32));
        let mut acc = Cx::zero(wp);
        // (5/2)_k/k! (p/b)^k (M/pi)^{5+2k}
        let mut coef = Cx::real(Float::with_val(wp, m_over_pi.clone().pow(5u32)));
        let mut k = 0u32;
        loop {
            let t = tilde.tail(4 + 2 * k, big_l);
            acc = acc + coef.scale(&t);
            let rk = (0..k).fold(1.0, |r, j| r * (2.5 + j as f64) / (j as f64 + 1.0));
            let bound = base * rk * ratio.powi(k as i32) / (3.0 + 2.0 * k as f64);
            if bound < eps * acc.abs_f64().max(eps) || k > 4 * wp {
                return (acc, bound);
            }
            let step = Float::with_val(wp, 2.5 + k as f64) / (k + 1);
            coef = (&coef * &pb).scale(&(Float::with_val(wp, &m_over_pi2 * &step)));
            k += 1;
        }
    }
}

/// `G` from the exact Taylor coefficients, for `|p|` inside the disc of convergence.
pub fn taylor_eval(coeffs: &[Rational], p: &Cx) -> Cx {
    let prec = p.prec();
    let mut acc = Cx::zero(prec);
    for c in coeffs.iter().rev() {
        acc = &acc * p;
        acc.re += rat_to_float(c, prec);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::series_coefficients;
    use crate::periodic::make_periodic;
    use crate::qseries::ThetaSpec;

    fn trefoil(count: usize) -> FormalSeries {
        let f = make_periodic(Rational::from((-1, 2)), 12, 1, 5).unwrap();
        series_coefficients(&ThetaSpec::periodic(1, 24, 1, f).unwrap(), count).unwrap()
    }

    #[test]
    fn constant_term_is_a1() {
        let s = trefoil(4);
        let g = borel_coefficients(&s, 3).unwrap();
        assert_eq!(g[0], Rational::from((23, 24)));
        assert_eq!(*s.c_m(), 1);
    }

    #[test]
    fn two_coefficient_forms_agree() {
        let s = trefoil(32);
        assert_eq!(borel_coefficients(&s, 30).unwrap(), bernoulli_form_coefficients(&s, 30));
    }

    #[test]
    fn hadamard_matches() {
        let s = trefoil(32);
        let h = hadamard_oracle(&s, 30).unwrap();
        assert_eq!(h.g2[0], Rational::from((6, 24)));
        assert_eq!(h.g2, g2_binomial_series(24, 30));
        assert!(hadamard_oracle(&s, 41).is_err());
    }

    #[test]
    fn trefoil_singularities() {
        let sing = singularity_set(&trefoil(2));
        assert_eq!(sing.first(6), vec![1, 5, 7, 11, 13, 17]);
        let p = sing.point(5, 64).to_f64();
        assert!((p - 25.0 * std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert_eq!(&sing.disjunction_disagreements(12), &[2, 3, 4, 8, 9, 10]);
    }

    #[test]
    fn closed_form_at_zero_is_a1() {
        let ctx = PrecisionContext::default();
        let g = BorelClosedForm::new(&trefoil(2));
        let v = g.eval(&Cx::zero(128), None, &ctx).unwrap();
        assert!((v.value.re.to_f64() - 23.0 / 24.0).abs() < 1e-15, "{v:?}");
        assert!(v.value.im.is_zero());
        let t0 = g.taylor_coefficient(0, 128).to_f64();
        assert!((t0 - 23.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn guards_and_branches() {
        let ctx = PrecisionContext::default();
        let g = BorelClosedForm::new(&trefoil(2));
        let s1 = Cx::real(g.singularities().point(1, 128));
        assert!(matches!(g.eval(&s1, None, &ctx), Err(Error::SingularProximity { .. })));
        let beyond = Cx::from_f64(128, 3.0, 0.0);
        assert!(matches!(g.eval(&beyond, None, &ctx), Err(Error::BranchAmbiguity(_))));
        let plus = g.eval(&beyond, Some(Side::Plus), &ctx).unwrap().value;
        let minus = g.eval(&beyond, Some(Side::Minus), &ctx).unwrap().value;
        assert!(plus.dist(&minus.conj()) < 1e-30);
        let above = g.eval(&Cx::from_f64(128, 3.0, 1e-30), None, &ctx).unwrap().value;
        assert!(above.dist(&plus) < 1e-20);
    }
}
