//! Lateral Borel-Laplace sums `S^+-`, the median sum, the Stokes
//! discontinuity and the boundary value of the median sum at
//! `x = -1/(2 pi i alpha)`.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::borel::{BorelClosedForm, Side};
use crate::dirichlet::PeriodicSeries;
use crate::exact::FormalSeries;
use crate::num::{pairwise_sum, Approx, Cx, PrecisionContext};
use crate::qseries::{theta_radial_limit, theta_upper_half, ThetaSpec, TwistedExpansion};
use crate::quad::exp_sinh;
use crate::special::special_e_shifted;
use crate::{Error, Result};

pub use crate::special::special_e;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    Plus,
    Minus,
    Median,
}

impl From<Side> for SumKind {
    fn from(s: Side) -> Self {
        match s {
            Side::Plus => SumKind::Plus,
            Side::Minus => SumKind::Minus,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LateralResult {
    pub value: Cx,
    pub err: f64,
    pub kind: SumKind,
    pub x: Cx,
    /// False when the error estimate exceeds the requested tolerance.
    pub converged: bool,
}

impl LateralResult {
    pub fn approx(&self) -> Approx {
        Approx::new(self.value.clone(), self.err)
    }
}

struct Setup {
    m: i64,
    b: i64,
    c: Rational,
    c_m: Rational,
    period: i64,
    tilde: crate::periodic::TildeFunction,
}

fn setup(series: &FormalSeries) -> Setup {
    let f = series.f();
    let tilde = f.tilde();
    Setup {
        m: f.modulus() as i64,
        b: series.b(),
        c: f.c().clone(),
        c_m: series.c_m().clone(),
        period: tilde.period() as i64,
        tilde,
    }
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// Bits of headroom demanded from exponentially small truncation errors.
fn target_exponent(prec: u32) -> f64 {
    prec as f64 * std::f64::consts::LN_2 + 12.0
}

fn round_up_to(n: f64, period: i64) -> i64 {
    let blocks = (n.max(1.0) / period as f64).ceil().max(1.0) as i64;
    blocks * period
}

/// `S^+-(x) = C_M + (3 pi c/(M^2 b)) sum_l l f~(l) int_0^{e^{+-i theta} inf}
/// e^{-px} (l^2 pi^2/M^2 - p/b)^{-5/2} dp`.
pub fn lateral_sum(series: &FormalSeries, x: &Cx, side: Side, ctx: &PrecisionContext) -> Result<LateralResult> {
    ctx.validate()?;
    let prec = ctx.prec;
    let wp = prec + 24;
    let s = setup(series);
    let x = x.with_prec(wp);
    let phi = ctx.ray_angle * side.sign() as f64;
    let dir = Cx::cis(&Float::with_val(wp, phi));
    let rate = (&x * &dir).re.to_f64();
    if rate <= 1e-12 * x.abs_f64() {
        return Err(Error::Domain(format!(
            "Re(e^{{i {phi}}} x) = {rate} must be positive for the Laplace ray to converge"
        )));
    }
    if x.re.is_zero() {
        return Err(Error::Domain("x must not lie on the imaginary axis".into()));
    }
    let pi = pi(wp);
    let m_over_pi = Float::with_val(wp, s.m) / &pi;
    // l with b A_l rate >= T so the Watson remainder of the tail is negligible
    let l_need = s.m as f64 / std::f64::consts::PI * (target_exponent(wp) / (s.b as f64 * rate)).sqrt();
    let big_l = round_up_to(l_need, s.period);
    if big_l as usize > ctx.ell_cap {
        return Err(Error::Budget(format!("lateral sum needs {big_l} terms, cap is {}", ctx.ell_cap)));
    }
    let quad_tol = 2f64.powi(-(prec as i32) + 8);
    let inv_b = Float::with_val(wp, s.b).recip();
    let five_halves = Float::with_val(wp, -2.5);
    let rate_f = Float::with_val(wp, rate);
    let m2 = s.m * s.m;
    let terms: Vec<(Cx, f64, bool)> = (1..=big_l)
        .into_par_iter()
        .filter(|&l| !s.tilde.is_zero(l))
        .map(|l| {
            let a = Float::with_val(wp, pi.square_ref()) * Rational::from((l * l, m2));
            // p = dir u / rate
            let step = dir.scale(&Float::with_val(wp, rate_f.recip_ref()));
            let r = exp_sinh(
                |u| {
                    let p = step.scale(u);
                    let w = Cx::new(Float::with_val(wp, &a - &p.re * &inv_b), -Float::with_val(wp, &p.im * &inv_b));
                    let e = (&p * &x).neg_ref().exp();
                    &e * &w.powf(&five_halves)
                },
                wp,
                quad_tol,
                ctx.max_quad_level,
            );
            let coef = s.tilde.value(l, wp) * l;
            let v = (&r.value * &step).scale(&coef);
            let err = r.err * coef.to_f64().abs() * step.abs_f64();
            (v, err, r.converged)
        })
        .collect();
    let quad_err: f64 = terms.iter().map(|t| t.1).sum();
    let all_converged = terms.iter().all(|t| t.2);
    let values: Vec<Cx> = terms.into_iter().map(|t| t.0).collect();
    let direct = pairwise_sum(&values, wp);
    let tilde = PeriodicSeries::new(s.tilde.period_values(wp), wp);
    let (tail, tail_err) = watson_tail(&tilde, &x, s.b, &m_over_pi, big_l as u64, wp);
    let k = prefactor(&s, wp);
    let sum = (direct + tail).scale(&k);
    let value = Cx::new(sum.re + Float::with_val(wp, &s.c_m), sum.im);
    let kf = k.to_f64().abs();
    let err = kf * (quad_err + tail_err) + value.abs_f64() * 2f64.powi(-(prec as i32));
    Ok(LateralResult {
        value: value.with_prec(prec),
        err,
        kind: side.into(),
        x: x.with_prec(prec),
        converged: all_converged && err <= ctx.tol,
    })
}

/// `3 pi c / (M^2 b)`.
fn prefactor(s: &Setup, wp: u32) -> Float {
    let r = Rational::from(&s.c * 3i32) / Integer::from(s.m * s.m * s.b);
    pi(wp) * r
}

/// `sum_{l>L} l f~(l) I_l` from Watson's lemma:
/// `I_l ~ sum_k (5/2)_k b^{-k} A_l^{-5/2-k} x^{-k-1}`, optimally truncated.
fn watson_tail(tilde: &PeriodicSeries, x: &Cx, b: i64, m_over_pi: &Float, big_l: u64, wp: u32) -> (Cx, f64) {
    let inv_x = x.recip();
    let m_over_pi2 = Float::with_val(wp, m_over_pi.square_ref());
    let mut coef = inv_x.scale(&Float::with_val(wp, m_over_pi.clone().pow(5u32)));
    let mut acc = Cx::zero(wp);
    let mut prev = f64::INFINITY;
    let eps = 2f64.powi(-(wp as i32));
    let mut k = 0u32;
    loop {
        let t = tilde.tail(4 + 2 * k, big_l);
        let term = coef.scale(&t);
        // crude magnitude of the term, independent of cancellations in t
        let bound = coef.abs_f64() * (big_l as f64).powi(-(3 + 2 * k as i32)) / (3.0 + 2.0 * k as f64);
        if bound > prev {
            return (acc, prev);
        }
        acc = acc + term;
        if bound < eps * acc.abs_f64().max(1e-300) || k > 4 * wp {
            return (acc, bound);
        }
        prev = bound;
        let step = Float::with_val(wp, 2.5 + k as f64) / b;
        coef = (&coef * &inv_x).scale(&Float::with_val(wp, &m_over_pi2 * &step));
        k += 1;
    }
}

/// `S^med(x) = (4 M c / pi^{3/2}) sum_l (f~(l)/l^2) E(l pi sqrt(bx)/M)`.
///
/// Summed as `(2Mc/pi^2) L(2, f~) + (4Mc/pi^{3/2}) sum_l (f~(l)/l^2) (E - 1/(2 sqrt pi))`;
/// the second series converges absolutely and its tail is taken from the
/// large-argument expansion of `E`.
pub fn median_sum(series: &FormalSeries, x: &Cx, ctx: &PrecisionContext) -> Result<LateralResult> {
    ctx.validate()?;
    if !x.re.is_sign_positive() || x.re.is_zero() {
        return Err(Error::Domain(format!("median sum needs Re x > 0, got {:?}", x.to_f64())));
    }
    let prec = ctx.prec;
    let wp = prec + 24;
    let s = setup(series);
    let x = x.with_prec(wp);
    let pi = pi(wp);
    // y_l^2 = l^2 beta, beta = pi^2 b x / M^2
    let beta = x.scale(&(Float::with_val(wp, pi.square_ref()) * Rational::from((s.b, s.m * s.m))));
    let reach = beta.re.to_f64().min(beta.abs_f64());
    let l_need = (target_exponent(wp) / reach).sqrt();
    let big_l = round_up_to(l_need, s.period);
    if big_l as usize > ctx.ell_cap {
        return Err(Error::Budget(format!("median sum needs {big_l} terms, cap is {}", ctx.ell_cap)));
    }
    let sqrt_beta = beta.sqrt();
    let terms: Vec<Cx> = (1..=big_l)
        .into_par_iter()
        .filter(|&l| !s.tilde.is_zero(l))
        .map(|l| {
            let y = sqrt_beta.scale(&Float::with_val(wp, l));
            let e = special_e_shifted(&y);
            e.scale(&(s.tilde.value(l, wp) / Float::with_val(wp, l * l)))
        })
        .collect();
    let direct = pairwise_sum(&terms, wp);
    let tilde = PeriodicSeries::new(s.tilde.period_values(wp), wp);
    // tail: (1/sqrt pi) sum_{k>=2} (2k-1)!!/2^k beta^{1-k} T_L(2k)
    let inv_beta = beta.recip();
    let mut coef = inv_beta.scale_f64(0.75);
    let mut acc = Cx::zero(wp);
    let mut prev = f64::INFINITY;
    let mut tail_err = 0.0;
    let eps = 2f64.powi(-(wp as i32));
    let mut k = 2u32;
    loop {
        let bound = coef.abs_f64() * (big_l as f64).powi(1 - 2 * k as i32) / (2.0 * k as f64 - 1.0);
        if bound > prev {
            tail_err = prev;
            break;
        }
        acc = acc + coef.scale(&tilde.tail(2 * k, big_l as u64));
        if bound < eps * acc.abs_f64().max(1e-300) || k > 4 * wp {
            tail_err = tail_err.max(bound);
            break;
        }
        prev = bound;
        let step = Float::with_val(wp, 2 * k + 1) / 2u32;
        coef = (&coef * &inv_beta).scale(&step);
        k += 1;
    }
    let sqrt_pi = Float::with_val(wp, pi.sqrt_ref());
    let shifted = direct + acc.scale(&Float::with_val(wp, sqrt_pi.recip_ref()));
    let mc = Float::with_val(wp, Rational::from(&s.c * Integer::from(4 * s.m)));
    let pref = Float::with_val(wp, &mc / &sqrt_pi) / &pi;
    let half = Float::with_val(wp, &mc / 2u32) / Float::with_val(wp, pi.square_ref()) * tilde.sum(2);
    let mut value = shifted.scale(&pref);
    value.re += half;
    let err = pref.to_f64().abs() * tail_err / std::f64::consts::PI.sqrt()
        + value.abs_f64() * 2f64.powi(-(prec as i32) + 4);
    Ok(LateralResult {
        value: value.with_prec(prec),
        err,
        kind: SumKind::Median,
        x: x.with_prec(prec),
        converged: err <= ctx.tol,
    })
}

/// `(2 M c / pi^2) sum_l f~(l)/l^2`, the right side of the constant identity.
pub fn constant_from_tilde(series: &FormalSeries, prec: u32) -> Approx {
    let s = setup(series);
    let wp = prec + 24;
    let tilde = PeriodicSeries::new(s.tilde.period_values(wp), wp);
    let pi = pi(wp);
    let v = Float::with_val(wp, Rational::from(&s.c * Integer::from(2 * s.m))) / Float::with_val(wp, pi.square_ref()) * tilde.sum(2);
    let err = v.to_f64().abs() * 2f64.powi(-(prec as i32) + 4);
    Approx::new(Cx::real(Float::with_val(prec, v)), err)
}

#[derive(Debug, Clone)]
pub struct Discontinuity {
    pub numeric: Approx,
    pub closed_form: Approx,
}

impl Discontinuity {
    pub fn residual(&self) -> f64 {
        self.numeric.value.dist(&self.closed_form.value)
    }
}

/// `S^+(x) - S^-(x)` numerically and from
/// `2i (2 b pi x)^{3/2} (sqrt 2 c/M^2) sum_l l f~(l) e^{-l^2 pi^2 b x/M^2}`.
pub fn discontinuity(series: &FormalSeries, x: &Cx, ctx: &PrecisionContext) -> Result<Discontinuity> {
    let plus = lateral_sum(series, x, Side::Plus, ctx)?;
    let minus = lateral_sum(series, x, Side::Minus, ctx)?;
    let numeric = Approx::new(&plus.value - &minus.value, plus.err + minus.err);
    let closed_form = discontinuity_closed_form(series, x, ctx)?;
    Ok(Discontinuity { numeric, closed_form })
}

pub fn discontinuity_closed_form(series: &FormalSeries, x: &Cx, ctx: &PrecisionContext) -> Result<Approx> {
    if !x.re.is_sign_positive() || x.re.is_zero() {
        return Err(Error::Domain("the discontinuity closed form needs Re x > 0".into()));
    }
    let prec = ctx.prec;
    let wp = prec + 16;
    let x = x.with_prec(wp);
    let f = series.f();
    let spec = ThetaSpec::tilde_of(f, 1)?;
    let b = series.b();
    // theta^{(1)}_{0,4M^2,f~}(tau) with q^{n^2/4M^2} = e^{-n^2 pi^2 b x/M^2}: tau = 2 pi i b x
    let tau = x.scale(&(pi(wp) * 2u32 * b)).mul_i();
    let theta = theta_upper_half(&spec, &tau, &ctx.with_prec(wp))?;
    let m = f.modulus() as i64;
    let two_b_pi_x = x.scale(&(pi(wp) * 2u32 * b));
    let pow = two_b_pi_x.powf(&Float::with_val(wp, 1.5));
    let c = Float::with_val(wp, f.c()) * Float::with_val(wp, 2u32).sqrt() / Float::with_val(wp, m * m);
    let v = (&pow * &theta.value).scale(&c).scale_f64(2.0).mul_i();
    let err = theta.err * pow.abs_f64() * c.to_f64().abs() * 2.0 + v.abs_f64() * 2f64.powi(-(prec as i32) + 4);
    Ok(Approx::new(v.with_prec(prec), err))
}

/// Boundary value of the median sum at `x = -1/(2 pi i alpha)`:
/// `(c b e^{pi i/4} / (M pi (i alpha)^{3/2})) int_0^{i inf} theta^{(0)}_{0,4M^2,f~}(b p) (1/alpha + p)^{-3/2} dp
///  + (b/(i alpha))^{3/2} (sqrt 2 c/M^2) theta^{(1)}_{0,4M^2,f~}(-b/alpha)`.
///
/// All powers are principal.
pub fn boundary_median(series: &FormalSeries, alpha: &Rational, ctx: &PrecisionContext) -> Result<Approx> {
    if alpha.cmp0().is_eq() {
        return Err(Error::InvalidConfig("alpha must be nonzero".into()));
    }
    let prec = ctx.prec;
    let wp = prec + 24;
    let f = series.f();
    let m = f.modulus() as i64;
    let b = series.b();
    let pi = pi(wp);
    let alpha_f = Float::with_val(wp, alpha);
    let inv_alpha = Float::with_val(wp, alpha_f.recip_ref());
    let theta0 = ThetaSpec::tilde_of(f, 0)?;
    let three_halves = Float::with_val(wp, -1.5);
    // p = i y, dp = i dy; theta^{(0)}(b i y) is the expansion of theta at 0 evaluated at height b y
    let expansion = TwistedExpansion::new(&theta0, &Rational::new(), wp)?;
    let tol = (ctx.tol * 1e-4).max(2f64.powi(-(prec as i32) + 8));
    let qctx = ctx.with_prec(wp);
    let r = exp_sinh(
        |y| {
            let h = Float::with_val(wp, y * b);
            match expansion.eval(&h, false, &qctx) {
                Ok(th) => Cx::new(inv_alpha.clone(), y.clone()).powf(&three_halves) * th.value,
                Err(_) => Cx::new(Float::with_val(wp, f64::NAN), Float::new(wp)),
            }
        },
        wp,
        tol,
        ctx.max_quad_level + 2,
    );
    let integral = r.value.mul_i();
    let i_alpha = Cx::new(Float::new(wp), alpha_f.clone());
    let i_alpha_pow = i_alpha.powf(&Float::with_val(wp, 1.5));
    let cb = Float::with_val(wp, Rational::from(f.c() * Integer::from(b))) / (Float::with_val(wp, m) * &pi);
    let first = (&Cx::root_of_unity(1, 8, wp) * &integral).scale(&cb);
    let first = &first / &i_alpha_pow;
    let theta1 = ThetaSpec::tilde_of(f, 1)?;
    let point = -Rational::from(b) / alpha;
    let limit = theta_radial_limit(&theta1, &point, &ctx.with_prec(wp))?;
    let ratio = Cx::new(Float::new(wp), Float::with_val(wp, -Float::with_val(wp, b) / &alpha_f));
    let pow = ratio.powf(&Float::with_val(wp, 1.5));
    let c2 = Float::with_val(wp, f.c()) * Float::with_val(wp, 2u32).sqrt() / Float::with_val(wp, m * m);
    let second = (&pow * &limit).scale(&c2);
    let value = first + second;
    let mut err = r.err * cb.to_f64().abs() / i_alpha_pow.abs_f64();
    err += value.abs_f64() * 2f64.powi(-(prec as i32) + 8);
    if !r.converged || !value.re.is_finite() {
        return Err(Error::Budget(format!(
            "boundary integral did not converge (estimate {:e})",
            r.err
        )));
    }
    Ok(Approx::new(value.with_prec(prec), err))
}

/// `x = -1/(2 pi i alpha)`.
pub fn boundary_point(alpha: &Rational, prec: u32) -> Cx {
    // -1/(2 pi i alpha) = i / (2 pi alpha)
    let im = Float::with_val(prec, alpha).recip() / (pi(prec) * 2u32);
    Cx::new(Float::new(prec), im)
}

/// The Watson (optimally truncated) asymptotic sum `sum_{n<=N*} a_n x^{-n}`,
/// with the first omitted term as error.
pub fn optimal_truncation(series: &FormalSeries, x: &Cx) -> Result<Approx> {
    let prec = x.prec();
    let inv = x.recip();
    let mut pow = Cx::one(prec);
    let mut acc = Cx::zero(prec);
    let mut prev = f64::INFINITY;
    let mut n = 0;
    loop {
        if n >= series.len() {
            return Err(Error::Budget(format!(
                "optimal truncation needs more than {} coefficients",
                series.len()
            )));
        }
        let term = pow.scale(&Float::with_val(prec, &series.a(n)));
        let mag = term.abs_f64();
        if mag > prev && n > 1 {
            return Ok(Approx::new(acc, mag));
        }
        acc = acc + term;
        prev = mag;
        pow = &pow * &inv;
        n += 1;
    }
}

/// `G(p)` convenience wrapper.
pub fn borel_closed_form(series: &FormalSeries) -> BorelClosedForm {
    BorelClosedForm::new(series)
}

/// Richardson extrapolation of the median sum to `x = -1/(2 pi i alpha)` along
/// `x_k = eps_k + x_0`, `eps_k = eps_0 2^{-k}`.
pub fn boundary_extrapolation(
    series: &FormalSeries,
    alpha: &Rational,
    eps0: f64,
    levels: usize,
    ctx: &PrecisionContext,
) -> Result<Approx> {
    let x0 = boundary_point(alpha, ctx.prec);
    let mut hs = Vec::with_capacity(levels);
    let mut ys = Vec::with_capacity(levels);
    for k in 0..levels {
        let e = Float::with_val(ctx.prec, eps0) >> k as u32;
        let x = Cx::new(e.clone(), x0.im.clone());
        ys.push(median_sum(series, &x, ctx)?.value);
        hs.push(e);
    }
    let (v, err) = crate::extrapolate::richardson(&hs, &ys);
    Ok(Approx::new(v, err))
}
