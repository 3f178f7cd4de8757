//! Double-exponential quadrature: exp-sinh on `[0, inf)` and tanh-sinh on
//! finite intervals, with level doubling and parallel node evaluation.

use rayon::prelude::*;
use rug::Float;

use crate::num::Cx;

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Cx,
    /// Difference between the last two levels.
    pub err: f64,
    pub converged: bool,
    pub nodes: usize,
}

#[derive(Clone, Copy)]
enum Kind {
    /// `x = e^{(pi/2) sinh t}`
    ExpSinh,
    /// `x = a + (b - a) (1 + tanh((pi/2) sinh t)) / 2`
    TanhSinh,
}

struct Rule<'a> {
    kind: Kind,
    a: &'a Float,
    b: &'a Float,
    prec: u32,
}

impl Rule<'_> {
    /// Node and weight `x(t)`, `x'(t)`.
    fn node(&self, t: f64) -> Option<(Float, Float)> {
        let p = self.prec;
        let t = Float::with_val(p, t);
        let half_pi = Float::with_val(p, rug::float::Constant::Pi) / 2u32;
        let u = Float::with_val(p, t.sinh_ref()) * &half_pi;
        let du = Float::with_val(p, t.cosh_ref()) * &half_pi;
        match self.kind {
            Kind::ExpSinh => {
                let x = u.exp();
                if x.is_zero() || x.is_infinite() {
                    return None;
                }
                let w = Float::with_val(p, &x * &du);
                Some((x, w))
            }
            Kind::TanhSinh => {
                let width = Float::with_val(p, self.b - self.a);
                // 1 + tanh u = 2 / (1 + e^{-2u}), written to keep endpoint distances exact
                let e = Float::with_val(p, -2 * u).exp();
                let one_plus = Float::with_val(p, 1u32 + &e);
                let frac = Float::with_val(p, one_plus.recip_ref()); // (1 + tanh u)/2
                let x = Float::with_val(p, &width * &frac) + self.a;
                if x <= *self.a || x >= *self.b {
                    return None;
                }
                // d/du of (1+tanh u)/2 = sech^2 u / 2 = 2 e^{-2u} / (1 + e^{-2u})^2
                let sq = Float::with_val(p, one_plus.square_ref());
                let w = Float::with_val(p, &e * 2u32) / sq * &du * &width;
                if w.is_zero() || !w.is_finite() {
                    return None;
                }
                Some((x, w))
            }
        }
    }
}

fn integrate<F>(rule: Rule<'_>, f: F, tol: f64, max_level: u32) -> QuadResult
where
    F: Fn(&Float) -> Cx + Sync,
{
    let prec = rule.prec;
    let eps = 2f64.powi(-(prec as i32) - 4);
    let h0 = 0.5;
    let t_max = 8.0;
    let eval = |t: f64| -> Option<Cx> {
        let (x, w) = rule.node(t)?;
        let v = f(&x);
        if !v.re.is_finite() || !v.im.is_finite() {
            return None;
        }
        Some(v.scale(&w))
    };
    // Level 0: scan outward to find where the terms become negligible.
    let centre = eval(0.0).unwrap_or_else(|| Cx::zero(prec));
    let mut sum = centre.clone();
    let mut nodes = 1usize;
    let mut scale = centre.abs_f64();
    let mut bounds = [0.0f64; 2];
    for (side, dir) in [1.0f64, -1.0].into_iter().enumerate() {
        let mut small = 0;
        let mut k = 1;
        loop {
            let t = dir * h0 * k as f64;
            if t.abs() > t_max {
                break;
            }
            let Some(term) = eval(t) else { break };
            nodes += 1;
            let mag = term.abs_f64();
            sum = sum + term;
            scale = scale.max(mag);
            bounds[side] = t;
            if mag <= eps * scale {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
            k += 1;
        }
    }
    let (t_hi, t_lo) = (bounds[0], bounds[1]);
    let mut estimate = sum.scale_f64(h0);
    let mut err = f64::INFINITY;
    let mut h = h0;
    for _level in 1..=max_level {
        h /= 2.0;
        let count = ((t_hi - t_lo) / h).round() as i64;
        let ts: Vec<f64> = (0..count)
            .filter(|j| j % 2 == 1)
            .map(|j| t_lo + j as f64 * h)
            .collect();
        let terms: Vec<Option<Cx>> = ts.par_iter().map(|&t| eval(t)).collect();
        nodes += terms.len();
        for term in terms.into_iter().flatten() {
            sum = sum + term;
        }
        let next = sum.scale_f64(h);
        err = next.dist(&estimate);
        estimate = next;
        if err <= tol || err <= 16.0 * eps * estimate.abs_f64().max(1e-300) {
            return QuadResult {
                value: estimate,
                err,
                converged: true,
                nodes,
            };
        }
    }
    QuadResult {
        value: estimate,
        err,
        converged: false,
        nodes,
    }
}

/// `int_0^inf f(x) dx`.
pub fn exp_sinh<F>(f: F, prec: u32, tol: f64, max_level: u32) -> QuadResult
where
    F: Fn(&Float) -> Cx + Sync,
{
    let zero = Float::new(prec);
    let rule = Rule {
        kind: Kind::ExpSinh,
        a: &zero,
        b: &zero,
        prec,
    };
    integrate(rule, f, tol, max_level)
}

/// `int_a^b f(x) dx`.
pub fn tanh_sinh<F>(f: F, a: &Float, b: &Float, prec: u32, tol: f64, max_level: u32) -> QuadResult
where
    F: Fn(&Float) -> Cx + Sync,
{
    let rule = Rule {
        kind: Kind::TanhSinh,
        a,
        b,
        prec,
    };
    integrate(rule, f, tol, max_level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_sinh_gaussian_and_gamma() {
        let prec = 192;
        // int_0^inf e^{-x^2} = sqrt(pi)/2
        let r = exp_sinh(
            |x| Cx::real(Float::with_val(prec, -Float::with_val(prec, x.square_ref())).exp()),
            prec,
            1e-40,
            10,
        );
        let expect = Float::with_val(prec, rug::float::Constant::Pi).sqrt() / 2u32;
        assert!(r.converged);
        assert!(Float::with_val(prec, &r.value.re - &expect).abs() < 1e-40);
        // int_0^inf x^{-1/2} e^{-x} = sqrt(pi)
        let r = exp_sinh(
            |x| Cx::real(Float::with_val(prec, -x).exp() / Float::with_val(prec, x.sqrt_ref())),
            prec,
            1e-40,
            10,
        );
        assert!(Float::with_val(prec, &r.value.re - expect * 2u32).abs() < 1e-40);
    }

    #[test]
    fn tanh_sinh_polynomial_and_endpoint_singularity() {
        let prec = 128;
        let a = Float::with_val(prec, 1);
        let b = Float::with_val(prec, 3);
        let r = tanh_sinh(|x| Cx::real(Float::with_val(prec, x.square_ref())), &a, &b, prec, 1e-30, 10);
        assert!((r.value.re.to_f64() - 26.0 / 3.0).abs() < 1e-14);
        // int_0^1 log x = -1
        let z = Float::new(prec);
        let one = Float::with_val(prec, 1);
        let r = tanh_sinh(|x| Cx::real(Float::with_val(prec, x.ln_ref())), &z, &one, prec, 1e-30, 10);
        assert!(Float::with_val(prec, &r.value.re + 1u32).abs() < 1e-30);
    }

    #[test]
    fn complex_integrand_on_rotated_ray() {
        // int_0^inf e^{-w x} dx = 1/w with w = e^{i pi/4}
        let prec = 128;
        let w = Cx::root_of_unity(1, 8, prec);
        let r = exp_sinh(|x| w.scale(x).neg_ref().exp(), prec, 1e-30, 10);
        assert!(r.value.dist(&w.recip()) < 1e-30);
    }
}
