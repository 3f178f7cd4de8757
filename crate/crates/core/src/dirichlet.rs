//! Dirichlet series `sum_l v(l) l^{-s}` with periodic real coefficients, summed
//! directly up to a multiple of the period and completed with Hurwitz zeta
//! values for the periodic tail.

use rug::ops::Pow;
use rug::Float;

use crate::exact::bernoulli_number;

/// Hurwitz zeta `zeta(s, q) = sum_{k>=0} (q+k)^{-s}` for integer `s >= 2`, `q > 0`,
/// by Euler-Maclaurin after shifting `q` far enough that the correction
/// series reaches `2^{-prec}`.
pub fn hurwitz_zeta(s: u32, q: &Float, prec: u32) -> Float {
    assert!(s >= 2, "hurwitz_zeta needs s >= 2");
    let wp = prec + 32;
    let q = Float::with_val(wp, q);
    let shift_target = 0.35 * prec as f64 + s as f64 + 8.0;
    let shift = (shift_target - q.to_f64()).ceil().max(0.0) as u64;
    let mut acc = Float::new(wp);
    for k in 0..shift {
        acc += Float::with_val(wp, &q + k).pow(-(s as i32));
    }
    let qq = Float::with_val(wp, &q + shift);
    let qpow = Float::with_val(wp, &qq).pow(-(s as i32));
    acc += Float::with_val(wp, &qpow * &qq) / (s - 1);
    acc += Float::with_val(wp, &qpow / 2u32);
    let eps = Float::with_val(wp, Float::i_exp(1, -(prec as i32) - 8));
    let inv_q2 = Float::with_val(wp, qq.square_ref()).recip();
    // term_j = B_{2j}/(2j)! * s (s+1) ... (s+2j-2) * q^{-s-2j+1}
    let mut rising = Float::with_val(wp, s);
    let mut qp = Float::with_val(wp, &qpow / &qq);
    let mut fact = Float::with_val(wp, 2u32);
    let mut prev = None::<Float>;
    for j in 1..4 * prec as usize {
        let b = Float::with_val(wp, &bernoulli_number(2 * j));
        let term = Float::with_val(wp, &b * &rising) * &qp / &fact;
        let mag = Float::with_val(wp, term.abs_ref());
        acc += &term;
        if mag < Float::with_val(wp, acc.abs_ref()) * &eps {
            break;
        }
        if let Some(p) = &prev {
            if mag > *p {
                break;
            }
        }
        prev = Some(mag);
        let a = 2 * j as u32;
        rising *= Float::with_val(wp, s + a - 1) * (s + a);
        fact *= Float::with_val(wp, a + 1) * (a + 2);
        qp *= &inv_q2;
    }
    Float::with_val(prec, acc)
}

/// Real periodic coefficients `v(1), ..., v(P)`.
#[derive(Debug, Clone)]
pub struct PeriodicSeries {
    values: Vec<Float>,
    prec: u32,
}

impl PeriodicSeries {
    /// `values[r - 1] = v(r)` for `r = 1..=P`.
    pub fn new(values: Vec<Float>, prec: u32) -> Self {
        assert!(!values.is_empty());
        Self { values, prec }
    }

    pub fn period(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn value(&self, l: u64) -> &Float {
        let p = self.period();
        &self.values[((l + p - 1) % p) as usize]
    }

    /// `sum_{l > n} v(l) l^{-s}` for integer `s >= 2`.
    pub fn tail(&self, s: u32, n: u64) -> Float {
        let wp = self.prec + 16;
        let p = self.period();
        let j = n.div_ceil(p);
        let mut acc = Float::new(wp);
        for l in n + 1..=j * p {
            let v = self.value(l);
            if !v.is_zero() {
                acc += Float::with_val(wp, l).pow(-(s as i32)) * v;
            }
        }
        let mut hz = Float::new(wp);
        for (r, v) in self.values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let q = Float::with_val(wp, j) + Float::with_val(wp, r as u64 + 1) / p;
            hz += hurwitz_zeta(s, &q, wp) * v;
        }
        acc += hz / Float::with_val(wp, p).pow(s);
        Float::with_val(self.prec, acc)
    }

    /// `L(s, v) = sum_{l >= 1} v(l) l^{-s}`.
    pub fn sum(&self, s: u32) -> Float {
        self.tail(s, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta_ref(s: u32, prec: u32) -> Float {
        Float::with_val(prec, Float::zeta_u(s))
    }

    #[test]
    fn hurwitz_at_one_is_riemann_zeta() {
        for s in [2, 3, 4, 7, 20] {
            let one = Float::with_val(256, 1);
            let h = hurwitz_zeta(s, &one, 256);
            let d = Float::with_val(256, &h - zeta_ref(s, 256)).abs();
            assert!(d < 1e-70, "s = {s}: {d}");
        }
    }

    #[test]
    fn hurwitz_half_relation() {
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let half = Float::with_val(192, 0.5);
        let h = hurwitz_zeta(4, &half, 192);
        let expect = zeta_ref(4, 192) * 15u32;
        assert!(Float::with_val(192, &h - &expect).abs() < 1e-50);
    }

    #[test]
    fn periodic_sum_matches_direct_beta() {
        // v = (1, 0, -1, 0): Dirichlet beta(2) = Catalan's constant
        let prec = 128;
        let v: Vec<Float> = [1, 0, -1, 0].iter().map(|&x| Float::with_val(prec, x)).collect();
        let series = PeriodicSeries::new(v, prec);
        let catalan = Float::with_val(prec, rug::float::Constant::Catalan);
        assert!(Float::with_val(prec, series.sum(2) - &catalan).abs() < 1e-35);
        // tail from an index that is not a multiple of the period
        let mut direct = Float::new(prec);
        for l in 1..=7u64 {
            direct += Float::with_val(prec, series.value(l)) / Float::with_val(prec, l * l);
        }
        let t = series.tail(2, 7);
        assert!(Float::with_val(prec, direct + t - catalan).abs() < 1e-35);
    }
}
