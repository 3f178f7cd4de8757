//! Exact Bernoulli numbers and polynomials, L-values at negative odd integers
//! and the coefficients of the formal series attached to a partial theta series.

use std::sync::{OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::num::{factorial, Cx};
use crate::periodic::PeriodicFunction;
use crate::qseries::ThetaSpec;
use crate::{Error, Result};

pub const DEFAULT_COEFF_COUNT: usize = 64;

static BERNOULLI: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();

fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// Bernoulli number `B_k` with `B_1 = -1/2`.
pub fn bernoulli_number(k: usize) -> Rational {
    let cache = BERNOULLI.get_or_init(|| RwLock::new(vec![Rational::from(1)]));
    if let Some(b) = cache.read().expect("bernoulli cache poisoned").get(k) {
        return b.clone();
    }
    let mut table = cache.write().expect("bernoulli cache poisoned");
    // another writer may have filled it meanwhile; extending is idempotent
    while table.len() <= k {
        let n = table.len();
        if n > 1 && n % 2 == 1 {
            table.push(Rational::new());
            continue;
        }
        let mut acc = Rational::new();
        for (j, bj) in table.iter().enumerate() {
            if bj.cmp0().is_ne() {
                acc += Rational::from(bj * binomial(n as u32 + 1, j as u32));
            }
        }
        table.push(-acc / (n as u32 + 1));
    }
    table[k].clone()
}

/// `B_k(x) = sum_j binom(k, j) B_j x^{k-j}`.
pub fn bernoulli_polynomial(k: usize, x: &Rational) -> Rational {
    let mut acc = Rational::new();
    let mut xpow = Rational::from(1);
    // j runs downward so x^{k-j} builds up incrementally
    for j in (0..=k).rev() {
        let bj = bernoulli_number(j);
        if bj.cmp0().is_ne() {
            acc += Rational::from(&bj * &xpow) * binomial(k as u32, j as u32);
        }
        xpow *= x;
    }
    acc
}

/// `sum_{m=1}^{M} f(m) B_k(m/M)`.
pub fn bernoulli_sum(f: &PeriodicFunction, k: usize) -> Rational {
    let m = f.modulus() as i64;
    let mut acc = Rational::new();
    for r in 1..=m {
        match f.sign(r) {
            0 => {}
            s => {
                let b = bernoulli_polynomial(k, &Rational::from((r, m)));
                if s > 0 {
                    acc += b;
                } else {
                    acc -= b;
                }
            }
        }
    }
    acc * f.c()
}

/// `L(-2n-1, f) = -(M^{2n+1}/(2n+2)) sum_{m=1}^M f(m) B_{2n+2}(m/M)`.
pub fn l_value(f: &PeriodicFunction, n: usize) -> Rational {
    let m = Integer::from(f.modulus());
    let pow = m.pow(2 * n as u32 + 1);
    -bernoulli_sum(f, 2 * n + 2) * pow / (2 * n as u32 + 2)
}

/// Coefficients `C_n = (-1)^n L(-2n-1, f)` of `F_f(x) = sum_n C_n/n! (1/(bx))^n`.
#[derive(Debug, Clone)]
pub struct FormalSeries {
    spec: ThetaSpec,
    f: PeriodicFunction,
    coeffs: Vec<Rational>,
    c_m: Rational,
}

impl FormalSeries {
    pub fn spec(&self) -> &ThetaSpec {
        &self.spec
    }

    pub fn f(&self) -> &PeriodicFunction {
        &self.f
    }

    pub fn b(&self) -> i64 {
        self.spec.b()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `C_n`.
    pub fn c(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    /// `a_n = C_n / (n! b^n)`.
    pub fn a(&self, n: usize) -> Rational {
        let den = factorial(n as u32) * Integer::from(self.b()).pow(n as u32);
        Rational::from(&self.coeffs[n] / den)
    }

    /// `C_M = -(M/2) sum_m f(m) B_2(m/M)`.
    pub fn c_m(&self) -> &Rational {
        &self.c_m
    }

    /// Same configuration with `count` coefficients.
    pub fn with_count(&self, count: usize) -> Result<Self> {
        series_coefficients(&self.spec, count)
    }
}

pub fn series_coefficients(spec: &ThetaSpec, count: usize) -> Result<FormalSeries> {
    if count == 0 {
        return Err(Error::InvalidConfig("coefficient count must be at least 1".into()));
    }
    let f = spec
        .periodic_fn()
        .ok_or_else(|| Error::InvalidConfig("formal series need a periodic coefficient function".into()))?
        .clone();
    let coeffs: Vec<Rational> = (0..count)
        .map(|n| {
            let l = l_value(&f, n);
            if n % 2 == 0 {
                l
            } else {
                -l
            }
        })
        .collect();
    let c_m = -bernoulli_sum(&f, 2) * Integer::from(f.modulus()) / 2u32;
    if c_m != coeffs[0] {
        return Err(Error::Consistency(format!(
            "C_M = {c_m} differs from C_0 = {}",
            coeffs[0]
        )));
    }
    Ok(FormalSeries {
        spec: spec.clone(),
        f,
        coeffs,
        c_m,
    })
}

/// Empirical fit `log(|a_n|/n!) ~ log A + n log B + gamma log n`.
#[derive(Debug, Clone, Copy)]
pub struct GevreyFit {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    /// `1/B`, the estimated Borel radius of convergence.
    pub radius: f64,
    pub max_residual: f64,
}

pub fn gevrey_estimate(series: &FormalSeries, count: usize) -> Result<GevreyFit> {
    if count < 10 {
        return Err(Error::InvalidConfig(format!("Gevrey fit needs count >= 10, got {count}")));
    }
    let series = if series.len() < count {
        series.with_count(count)?
    } else {
        series.clone()
    };
    let start = count / 2;
    let mut rows = Vec::new();
    for n in start..count {
        let an = series.a(n);
        if an.cmp0().is_eq() {
            continue;
        }
        let ratio = Rational::from(an.abs_ref()) / factorial(n as u32);
        let log = Float::with_val(128, &ratio).ln().to_f64();
        rows.push(([1.0, n as f64, (n as f64).ln()], log));
    }
    if rows.len() < 4 {
        return Err(Error::Consistency("too few nonzero coefficients for a Gevrey fit".into()));
    }
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (x, y) in &rows {
        for i in 0..3 {
            atb[i] += x[i] * y;
            for j in 0..3 {
                ata[i][j] += x[i] * x[j];
            }
        }
    }
    let sol = solve3(ata, atb)
        .ok_or_else(|| Error::Consistency("singular Gevrey least-squares system".into()))?;
    let max_residual = rows
        .iter()
        .map(|(x, y)| (sol[0] * x[0] + sol[1] * x[1] + sol[2] * x[2] - y).abs())
        .fold(0.0, f64::max);
    let fit = GevreyFit {
        a: sol[0].exp(),
        b: sol[1].exp(),
        gamma: sol[2],
        radius: (-sol[1]).exp(),
        max_residual,
    };
    if !fit.b.is_finite() || !fit.a.is_finite() || max_residual > 1.0 {
        return Err(Error::Consistency(format!("coefficients do not look Gevrey-1: {fit:?}")));
    }
    Ok(fit)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Left side of the even-Bernoulli generating identity,
/// `(1/(My)) sum_n S_{2n+2}/(2n+2)! (iMy)^{2n+2}` with `S_k = sum_m f(m) B_k(m/M)`,
/// truncated once the tail bound drops below `2^{-prec}`. Needs `|y| < 2pi/M`.
pub fn bernoulli_generating_series(f: &PeriodicFunction, y: &Cx) -> Result<(Cx, f64)> {
    let prec = y.prec();
    let m = f.modulus() as i64;
    let my = y.scale(&Float::with_val(prec, m));
    let r = my.abs_f64() / (2.0 * std::f64::consts::PI);
    if r >= 1.0 {
        return Err(Error::Domain(format!("|y| = {} must be below 2 pi / M", y.abs_f64())));
    }
    if my.is_zero() {
        return Err(Error::Domain("y must be nonzero".into()));
    }
    let ratio = r * r;
    let abs_c = f.c().to_f64().abs();
    // |B_{2k}(x)|/(2k)! <= |B_{2k}|/(2k)! <= 4 (2 pi)^{-2k}; four residues carry |c|
    let scale = 16.0 * abs_c / my.abs_f64();
    let target = 2f64.powi(-(prec as i32));
    let imy = my.mul_i();
    let imy2 = &imy * &imy;
    let mut pow = imy2.clone();
    let mut acc = Cx::zero(prec);
    let mut k = 1usize;
    loop {
        let s = bernoulli_sum(f, 2 * k);
        let coeff = Float::with_val(prec, &(s / factorial(2 * k as u32)));
        acc = acc + pow.scale(&coeff);
        pow = &pow * &imy2;
        let tail = scale * ratio.powi(k as i32 + 1) / (1.0 - ratio);
        if tail < target || k > 20_000 {
            let value = &acc / &my;
            return Ok((value, tail));
        }
        k += 1;
    }
}

/// Right side `-2c sin((k2-k1)y/2) sin((M-k1-k2)y/2) / sin(My/2)`.
pub fn bernoulli_generating_closed_form(f: &PeriodicFunction, y: &Cx) -> Cx {
    let prec = y.prec();
    let m = f.modulus() as i64;
    let sin_half = |k: i64| {
        let z = y.scale(&Float::with_val(prec, k)).scale_f64(0.5);
        csin(&z)
    };
    let num = &sin_half(f.k2() - f.k1()) * &sin_half(m - f.k1() - f.k2());
    let den = sin_half(m);
    let c2 = Float::with_val(prec, Rational::from(f.c() * -2i32));
    (&num / &den).scale(&c2)
}

/// Complex sine via `(e^{iz} - e^{-iz}) / 2i`.
pub fn csin(z: &Cx) -> Cx {
    let iz = z.mul_i();
    let a = iz.exp();
    let b = iz.neg_ref().exp();
    let d = &a - &b;
    // divide by 2i: (re + i im)/(2i) = im/2 - i re/2
    Cx::new(d.im / 2u32, -d.re / 2u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::{chi_function, make_periodic, ChiParams};

    fn trefoil_series(count: usize) -> FormalSeries {
        let f = make_periodic(Rational::from((-1, 2)), 12, 1, 5).unwrap();
        series_coefficients(&ThetaSpec::periodic(1, 24, 1, f).unwrap(), count).unwrap()
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli_number(0), 1);
        assert_eq!(bernoulli_number(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli_number(2), Rational::from((1, 6)));
        assert_eq!(bernoulli_number(3), 0);
        assert_eq!(bernoulli_number(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli_number(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli_number(20), Rational::from((-174611, 330)));
    }

    #[test]
    fn bernoulli_polynomial_examples() {
        assert_eq!(bernoulli_polynomial(2, &Rational::new()), Rational::from((1, 6)));
        assert_eq!(bernoulli_polynomial(2, &Rational::from((1, 12))), Rational::from((13, 144)));
        assert_eq!(
            bernoulli_polynomial(4, &Rational::from((5, 12))),
            Rational::from((2669, 103680))
        );
        assert_eq!(bernoulli_polynomial(1, &Rational::from(1)), Rational::from((1, 2)));
    }

    #[test]
    fn trefoil_l_values() {
        let chi = make_periodic(Rational::from(1), 12, 1, 5).unwrap();
        assert_eq!(l_value(&chi, 0), -2);
        assert_eq!(l_value(&chi, 1), 46);
        let neg = chi.with_scale(Rational::from(-1)).unwrap();
        assert_eq!(l_value(&neg, 3), -l_value(&chi, 3));
    }

    #[test]
    fn trefoil_coefficients() {
        let s = trefoil_series(4);
        let expect = [1, 23, 1681, 257543];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(*s.c(n), *e, "C_{n}");
        }
        assert_eq!(*s.c_m(), 1);
        assert_eq!(s.a(1), Rational::from((23, 24)));
        assert!(series_coefficients(s.spec(), 0).is_err());
    }

    #[test]
    fn gevrey_radius_trefoil() {
        let fit = gevrey_estimate(&trefoil_series(64), 64).unwrap();
        let target = std::f64::consts::PI.powi(2) / 6.0;
        assert!((fit.radius / target - 1.0).abs() < 1e-3, "{fit:?}");
    }

    #[test]
    fn gevrey_scaling_in_c() {
        let f = make_periodic(Rational::from(-1), 12, 1, 5).unwrap();
        let s2 = series_coefficients(&ThetaSpec::periodic(1, 24, 1, f).unwrap(), 40).unwrap();
        let a = gevrey_estimate(&trefoil_series(40), 40).unwrap();
        let b = gevrey_estimate(&s2, 40).unwrap();
        assert!((a.b - b.b).abs() < 1e-9 * a.b);
        assert!((b.a / a.a - 2.0).abs() < 1e-9);
    }

    #[test]
    fn gevrey_radius_three_four() {
        let f = chi_function(ChiParams::new(3, 4, 1, 1).unwrap()).unwrap();
        let s = series_coefficients(&ThetaSpec::periodic(0, 48, 1, f).unwrap(), 64).unwrap();
        let fit = gevrey_estimate(&s, 64).unwrap();
        let target = std::f64::consts::PI.powi(2) / 12.0;
        assert!((fit.radius / target - 1.0).abs() < 1e-3, "{fit:?}");
    }

    #[test]
    fn generating_identity_trefoil() {
        let f = make_periodic(Rational::from((-1, 2)), 12, 1, 5).unwrap();
        for y in [0.05, 0.2, -0.3] {
            let yc = Cx::from_f64(256, y, 0.0);
            let (lhs, tail) = bernoulli_generating_series(&f, &yc).unwrap();
            let rhs = bernoulli_generating_closed_form(&f, &yc);
            assert!(lhs.dist(&rhs) < 1e-40, "y = {y}: {lhs:?} vs {rhs:?}");
            assert!(tail < 1e-60);
        }
    }
}
