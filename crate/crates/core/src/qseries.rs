//! Partial theta series `theta^{(nu)}_{a,b,f}(q) = sum_{n>=0} n^nu f(n) q^{(n^2-a)/b}`.

use std::sync::RwLock;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::exact::bernoulli_number;
use crate::num::{pairwise_sum, Approx, Cx, PrecisionContext};
use crate::periodic::{chi_function, lcm, pair_set, s_matrix_entry, ChiParams, PeriodicFunction, TildeFunction};
use crate::quad::{exp_sinh, tanh_sinh};
use crate::{Error, Result};

/// Coefficient function of a partial theta series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficients {
    Periodic(PeriodicFunction),
    Tilde(TildeFunction),
}

impl Coefficients {
    pub fn period(&self) -> u32 {
        match self {
            Coefficients::Periodic(f) => f.modulus(),
            Coefficients::Tilde(t) => t.period(),
        }
    }

    pub fn is_zero(&self, n: i64) -> bool {
        match self {
            Coefficients::Periodic(f) => f.sign(n) == 0,
            Coefficients::Tilde(t) => t.is_zero(n),
        }
    }

    pub fn value(&self, n: i64, prec: u32) -> Float {
        match self {
            Coefficients::Periodic(f) => f.value_float(n, prec),
            Coefficients::Tilde(t) => t.value(n, prec),
        }
    }

    /// Exact value when the coefficients are rational.
    pub fn rational(&self, n: i64) -> Option<Rational> {
        match self {
            Coefficients::Periodic(f) => Some(f.value(n)),
            Coefficients::Tilde(_) => None,
        }
    }
}

/// Parameters `(a, b, nu, f)` of `theta^{(nu)}_{a,b,f}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaSpec {
    a: i64,
    b: i64,
    nu: u8,
    coeffs: Coefficients,
}

impl ThetaSpec {
    pub fn new(a: i64, b: i64, nu: u8, coeffs: Coefficients) -> Result<Self> {
        if a < 0 {
            return Err(Error::InvalidConfig(format!("a = {a} must be nonnegative")));
        }
        if b <= 0 {
            return Err(Error::InvalidConfig(format!("b = {b} must be positive")));
        }
        if nu > 1 {
            return Err(Error::InvalidConfig(format!("nu = {nu} must be 0 or 1")));
        }
        Ok(Self { a, b, nu, coeffs })
    }

    /// `theta^{(nu)}_{a,b,f}` for a periodic `f`.
    pub fn periodic(a: i64, b: i64, nu: u8, f: PeriodicFunction) -> Result<Self> {
        Self::new(a, b, nu, Coefficients::Periodic(f))
    }

    /// `theta^{(nu)}_{0,4M^2,f~}`, the series appearing in the resummation formulas.
    pub fn tilde_of(f: &PeriodicFunction, nu: u8) -> Result<Self> {
        let m = f.modulus() as i64;
        Self::new(0, 4 * m * m, nu, Coefficients::Tilde(f.tilde()))
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn nu(&self) -> u8 {
        self.nu
    }

    pub fn coeffs(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn with_nu(&self, nu: u8) -> Result<Self> {
        Self::new(self.a, self.b, nu, self.coeffs.clone())
    }

    /// The periodic coefficient function, if this is not a tilde series.
    pub fn periodic_fn(&self) -> Option<&PeriodicFunction> {
        match &self.coeffs {
            Coefficients::Periodic(f) => Some(f),
            Coefficients::Tilde(_) => None,
        }
    }
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

fn headroom(prec: u32) -> f64 {
    prec as f64 * std::f64::consts::LN_2 + 12.0
}

/// `theta^{(nu)}_{a,b,f}(tau)` with `q = e^{2 pi i tau}`, `Im tau > 0`, by direct
/// summation up to a Gaussian tail below the working precision.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
pub fn theta_upper_half(spec: &ThetaSpec, tau: &Cx, ctx: &PrecisionContext) -> Result<Approx> {
    let y = tau.im.to_f64();
    if !(y > 0.0) {
        return Err(Error::Domain(format!("theta series needs Im tau > 0, got {y}")));
    }
    let prec = ctx.prec;
    let wp = prec + 24;
    let b = spec.b as f64;
    let rate = 2.0 * std::f64::consts::PI * y / b;
    let terms = ((headroom(wp) + 2.0 * (rate.recip().max(1.0)).ln()) / rate + spec.a as f64).sqrt().ceil() as usize + 2;
    if terms > ctx.ell_cap {
        return Err(Error::Budget(format!(
            "theta series at Im tau = {y:e} needs {terms} terms, cap is {}",
            ctx.ell_cap
        )));
    }
    let tau = tau.with_prec(wp);
    let two_pi_i_tau = tau.scale(&(pi(wp) * 2u32)).mul_i();
    let inv_b = Float::with_val(wp, spec.b).recip();
    // q^{(n^2-a)/b}: start at n = 0, ratio q^{(2n+1)/b}, ratio of ratios q^{2/b}
    let mut power = two_pi_i_tau.scale(&Float::with_val(wp, -spec.a)).scale(&inv_b).exp();
    let mut ratio = two_pi_i_tau.scale(&inv_b).exp();
    let step = &ratio * &ratio;
    let mut acc = Cx::zero(wp);
    let mut last = 0.0f64;
    for n in 0..terms as i64 {
        if !spec.coeffs.is_zero(n) && (spec.nu == 0 || n > 0) {
            let mut c = spec.coeffs.value(n, wp);
            if spec.nu == 1 {
                c *= n;
            }
            let term = power.scale(&c);
            last = term.abs_f64();
            acc = acc + term;
        }
        power = &power * &ratio;
        ratio = &ratio * &step;
    }
    let err = last * 1e-30 + acc.abs_f64().max(1.0) * 2f64.powi(-(prec as i32) + 4);
    Ok(Approx::new(acc.with_prec(prec), err))
}

/// The coefficients twisted by the phase at a rational point:
/// `h(n) = f(n) e^{2 pi i alpha (n^2 - a)/b}`, periodic with period `P`.
///
/// Near `tau = alpha` the series is expanded as
/// `theta(alpha + i y) = e^{2 pi y a/b} [h-term at n=0 + sum_{n>=1} n^nu h(n) e^{-t n^2}]`,
/// `t = 2 pi y/b`, with
/// `sum n^nu h(n) e^{-t n^2} ~ pole term + sum_k L(-2k-nu, h) (-t)^k / k!`.
pub struct TwistedExpansion {
    spec: ThetaSpec,
    alpha: Rational,
    period: u64,
    /// `h(m)` for `m = 1..=P`.
    h: Vec<Cx>,
    /// Contribution of `n = 0` (only for `nu = 0`).
    h0: Cx,
    mean: Cx,
    prec: u32,
    /// `L(-2k-nu, h)` for `k = 0, 1, ...`, filled on demand.
    lvals: RwLock<Vec<Cx>>,
    /// `sum_m h(m) (m/P)^r`.
    moments: RwLock<Vec<Cx>>,
}

/// Reduced phase `alpha (n^2 - a)/b mod 1` as a root of unity.
fn twist_phase(alpha: &Rational, n: i64, a: i64, b: i64, prec: u32) -> Cx {
    let num = alpha.numer() * Integer::from(n as i128 * n as i128 - a as i128);
    let den = Integer::from(alpha.denom() * b);
    let r = <(Integer, Integer)>::from(num.div_rem_euc_ref(&den)).1;
    let g = Integer::from(r.gcd_ref(&den));
    let (r, den) = if g.cmp0().is_eq() { (r, den) } else { (r / &g, den / g) };
    Cx::root_of_unity(r.to_i64().expect("phase numerator fits"), den.to_u64().expect("phase denominator fits"), prec)
}

/// Smallest `d | 2 q b` with `e^{2 pi i p ((n+d)^2 - n^2)/(q b)} = 1` for all `n`.
fn phase_period(alpha: &Rational, b: i64) -> u64 {
    let qb = Integer::from(alpha.denom() * b);
    let g = Integer::from(alpha.numer().gcd_ref(&qb));
    let modulus = Integer::from(&qb / &g).to_u64().expect("phase modulus fits");
    let bound = 2 * modulus;
    (1..=bound)
        .filter(|d| bound % d == 0)
        .find(|&d| (2 * d) % modulus == 0 && (d as u128 * d as u128).is_multiple_of(modulus as u128))
        .unwrap_or(bound)
}

impl TwistedExpansion {
    pub fn new(spec: &ThetaSpec, alpha: &Rational, prec: u32) -> Result<Self> {
        let wp = prec + 32;
        let phase = phase_period(alpha, spec.b);
        let period = lcm(spec.coeffs.period() as i64, phase as i64) as u64;
        if period as usize > 4_000_000 {
            return Err(Error::Budget(format!("twisted period {period} is too large")));
        }
        let h: Vec<Cx> = (1..=period as i64)
            .into_par_iter()
            .map(|m| {
                if spec.coeffs.is_zero(m) {
                    Cx::zero(wp)
                } else {
                    twist_phase(alpha, m, spec.a, spec.b, wp).scale(&spec.coeffs.value(m, wp))
                }
            })
            .collect();
        let h0 = if spec.nu == 0 && !spec.coeffs.is_zero(0) {
            twist_phase(alpha, 0, spec.a, spec.b, wp).scale(&spec.coeffs.value(0, wp))
        } else {
            Cx::zero(wp)
        };
        let mean = pairwise_sum(&h, wp).scale(&Float::with_val(wp, period).recip());
        Ok(Self {
            spec: spec.clone(),
            alpha: alpha.clone(),
            period,
            h,
            h0,
            mean,
            prec: wp,
            lvals: RwLock::new(Vec::new()),
            moments: RwLock::new(Vec::new()),
        })
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    /// `h(n)`, exactly periodic by construction.
    pub fn h(&self, n: i64) -> &Cx {
        let p = self.period as i64;
        let r = n.rem_euclid(p);
        let idx = if r == 0 { p - 1 } else { r - 1 };
        &self.h[idx as usize]
    }

    pub fn mean(&self) -> &Cx {
        &self.mean
    }

    /// Whether the mean of `h` vanishes to working precision.
    pub fn mean_vanishes(&self) -> bool {
        let scale: f64 = self.h.iter().map(|v| v.abs_f64()).fold(0.0, f64::max).max(1e-300);
        self.mean.abs_f64() <= scale * 2f64.powi(-(self.prec as i32) / 2)
    }

    fn moment(&self, r: usize) -> Cx {
        if let Some(v) = self.moments.read().expect("moment cache").get(r) {
            return v.clone();
        }
        let mut cache = self.moments.write().expect("moment cache");
        let wp = self.prec + 64;
        let p = Float::with_val(wp, self.period);
        while cache.len() <= r {
            let k = cache.len() as u32;
            let terms: Vec<Cx> = self
                .h
                .par_iter()
                .enumerate()
                .map(|(i, v)| {
                    let x = Float::with_val(wp, (i + 1) as u64) / &p;
                    v.with_prec(wp).scale(&crate::num::fpow(&x, k))
                })
                .collect();
            cache.push(pairwise_sum(&terms, wp));
        }
        cache[r].clone()
    }

    /// `L(-j, h) = -(P^j/(j+1)) sum_m h(m) B_{j+1}(m/P)`.
    pub fn l_value(&self, j: u32) -> Cx {
        let wp = self.prec + 64;
        let k = j as usize + 1;
        // sum_m h(m) B_k(m/P) = sum_i binom(k,i) B_i W_{k-i}
        let mut acc = Cx::zero(wp);
        for i in 0..=k {
            let bi = bernoulli_number(i);
            if bi.cmp0().is_eq() {
                continue;
            }
            let c = Float::with_val(wp, &bi) * Integer::from(Integer::binomial_u(k as u32, i as u32));
            acc = acc + self.moment(k - i).scale(&c);
        }
        let pj = Float::with_val(wp, self.period).pow(j);
        let scale = -Float::with_val(wp, pj / (j + 1));
        acc.scale(&scale).with_prec(self.prec)
    }

    fn expansion_coeff(&self, k: usize) -> Cx {
        if let Some(v) = self.lvals.read().expect("l-value cache").get(k) {
            return v.clone();
        }
        let v = self.l_value(2 * k as u32 + self.spec.nu as u32);
        let mut cache = self.lvals.write().expect("l-value cache");
        while cache.len() < k {
            let kk = cache.len();
            cache.push(self.l_value(2 * kk as u32 + self.spec.nu as u32));
        }
        if cache.len() == k {
            cache.push(v.clone());
        }
        v
    }

    /// Radial limit `lim_{y->0+} theta(alpha + i y)`.
    pub fn radial_limit(&self) -> Result<Cx> {
        if !self.mean_vanishes() {
            return Err(Error::NoRadialLimit(format!(
                "twisted coefficients at alpha = {} have nonzero mean {:?} over period {}",
                self.alpha,
                self.mean.to_f64(),
                self.period
            )));
        }
        Ok(self.expansion_coeff(0) + self.h0.clone())
    }

    /// `theta(alpha + i y)` from the small-`y` expansion, if it reaches the
    /// working precision; `drop_constant` removes `L(-nu, h)` and the `n = 0` term.
    pub fn eval_expansion(&self, y: &Float, drop_constant: bool) -> Option<Approx> {
        let wp = self.prec;
        let t = Float::with_val(wp, y * pi(wp) * 2u32) / self.spec.b;
        let neg_t = Cx::real(-t.clone());
        let mut acc = Cx::zero(wp);
        let eps = 2f64.powi(-(wp as i32) + 40);
        let mut pow = Cx::one(wp);
        let mut prev = f64::INFINITY;
        let mut last = f64::INFINITY;
        let mut done = false;
        for k in 0..64usize {
            if k > 0 {
                pow = (&pow * &neg_t).scale(&Float::with_val(wp, k as u32).recip());
            }
            let term = &pow * &self.expansion_coeff(k);
            let mag = term.abs_f64();
            if k > 2 && mag > prev {
                break;
            }
            if !(drop_constant && k == 0) {
                acc = acc + term;
            }
            last = mag;
            prev = if mag == 0.0 { prev } else { mag };
            if k > 0 && mag <= eps * acc.abs_f64().max(1e-30) {
                done = true;
                break;
            }
        }
        if !done && last > eps * acc.abs_f64().max(1.0) * 1e6 {
            return None;
        }
        if !self.mean.is_zero() && !self.mean_vanishes() {
            let pole = if self.spec.nu == 0 {
                // mean sqrt(pi/t)/2
                let s = Float::with_val(wp, pi(wp) / &t).sqrt() / 2u32;
                self.mean.scale(&s)
            } else {
                self.mean.scale(&Float::with_val(wp, 2u32 * &t).recip())
            };
            acc = acc + pole;
        }
        if !drop_constant {
            acc = acc + self.h0.clone();
        }
        if self.spec.a != 0 {
            let g = Float::with_val(wp, &t * self.spec.a).exp();
            acc = acc.scale(&g);
        }
        Some(Approx::new(acc, last))
    }

    /// `theta(alpha + i y)` by direct summation or, for small `y`, the expansion.
    pub fn eval(&self, y: &Float, drop_constant: bool, ctx: &PrecisionContext) -> Result<Approx> {
        let yf = y.to_f64();
        let rate = 2.0 * std::f64::consts::PI * yf / self.spec.b as f64;
        let direct_terms = (headroom(self.prec) / rate).sqrt();
        if direct_terms > 2000.0 {
            if let Some(v) = self.eval_expansion(y, drop_constant) {
                return Ok(v);
            }
        }
        let tau = Cx::new(Float::with_val(self.prec, &self.alpha), y.clone());
        let mut v = theta_upper_half(&self.spec, &tau, &ctx.with_prec(self.prec))?;
        if drop_constant {
            let c = self.expansion_coeff(0) + self.h0.clone();
            v.value = &v.value - &c;
        }
        Ok(v)
    }
}

/// `lim_{y->0+} theta^{(nu)}_{a,b,f}(alpha + i y)` as an L-value of the twisted
/// coefficients.
pub fn theta_radial_limit(spec: &ThetaSpec, alpha: &Rational, ctx: &PrecisionContext) -> Result<Cx> {
    if alpha.cmp0().is_eq() {
        return Err(Error::InvalidConfig("radial limit point alpha must be nonzero".into()));
    }
    let e = TwistedExpansion::new(spec, alpha, ctx.prec)?;
    Ok(e.radial_limit()?.with_prec(ctx.prec))
}

/// Lower end of the Eichler-type integral.
#[derive(Debug, Clone, PartialEq)]
pub enum EichlerLower {
    /// `conj(z)`: the non-holomorphic Eichler integral.
    Conj,
    /// A rational point: the period function `r(z; alpha)`.
    Rational(Rational),
}

fn chi_spec(p: ChiParams, nu: u8) -> Result<ThetaSpec> {
    ThetaSpec::periodic(0, 4 * p.s * p.t, nu, chi_function(p)?)
}

/// `sqrt(st/(8 pi^2))`.
fn eichler_norm(p: ChiParams, prec: u32) -> Float {
    let v = Float::with_val(prec, p.s * p.t) / 8u32 / Float::with_val(prec, pi(prec).square_ref());
    v.sqrt()
}

/// `sqrt(st i/(8 pi^2)) int_{lower}^{i inf} theta^{(0)}_{0,4st,chi}(tau) (tau - z)^{-3/2} dtau`
/// along the vertical ray, for `z` in the lower half-plane.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
pub fn eichler_integral(p: ChiParams, z: &Cx, lower: &EichlerLower, ctx: &PrecisionContext) -> Result<Approx> {
    if !(z.im.to_f64() < 0.0) {
        return Err(Error::Domain("the Eichler integral needs z in the lower half-plane".into()));
    }
    let prec = ctx.prec;
    let wp = prec + 24;
    let spec = chi_spec(p, 0)?;
    let z = z.with_prec(wp);
    let start = match lower {
        EichlerLower::Conj => z.conj(),
        EichlerLower::Rational(a) => Cx::real(Float::with_val(wp, a)),
    };
    let guard = start.dist(&z);
    if guard < 1e-6 {
        return Err(Error::SingularProximity {
            point: format!("{:?}", start.to_f64()),
            singularity: format!("{:?}", z.to_f64()),
            guard,
        });
    }
    let three_halves = Float::with_val(wp, -1.5);
    // tau = start + i y; dtau = i dy; the i and sqrt(i) combine with (tau - z)^{-3/2}
    let phase = Cx::root_of_unity(3, 8, wp);
    let kernel = |y: &Float, th: &Cx| -> Cx {
        let tau = Cx::new(start.re.clone(), Float::with_val(wp, &start.im + y));
        let w = &tau - &z;
        &w.powf(&three_halves) * th
    };
    let qctx = ctx.with_prec(wp);
    let value = match lower {
        EichlerLower::Conj => {
            let r = exp_sinh(
                |y| {
                    let tau = Cx::new(start.re.clone(), Float::with_val(wp, &start.im + y));
                    match theta_upper_half(&spec, &tau, &qctx) {
                        Ok(th) => kernel(y, &th.value),
                        Err(_) => Cx::new(Float::with_val(wp, f64::NAN), Float::new(wp)),
                    }
                },
                wp,
                ctx.tol * 1e-3,
                ctx.max_quad_level,
            );
            check_quad(&r, "Eichler integral")?;
            r
        }
        EichlerLower::Rational(a) => {
            let ex = TwistedExpansion::new(&spec, a, wp)?;
            split_ray(&ex, false, &|y, th| kernel(y, th), ctx)?
        }
    };
    let norm = eichler_norm(p, wp);
    let v = (&value.value * &phase).scale(&norm);
    Ok(Approx::new(v.with_prec(prec), value.err * norm.to_f64()))
}

/// Boundary value `lim_{z->alpha} Phi^(z) = sqrt(st/(8 pi^2)) int_0^inf theta(alpha + i y) y^{-3/2} dy`.
pub fn eichler_boundary(p: ChiParams, alpha: &Rational, ctx: &PrecisionContext) -> Result<Approx> {
    let prec = ctx.prec;
    let wp = prec + 24;
    let spec = chi_spec(p, 0)?;
    let ex = TwistedExpansion::new(&spec, alpha, wp)?;
    let c0 = ex.radial_limit()?;
    if c0.abs_f64() > 2f64.powi(-(prec as i32) / 2) {
        return Err(Error::Domain(format!(
            "theta^(0) does not vanish at alpha = {alpha} (limit {:?}); the boundary integral diverges",
            c0.to_f64()
        )));
    }
    let three_halves = Float::with_val(wp, -1.5);
    let r = split_ray(&ex, true, &|y, th| th.scale(&y.clone().pow(&three_halves)), ctx)?;
    let norm = eichler_norm(p, wp);
    let v = r.value.scale(&norm);
    Ok(Approx::new(v.with_prec(prec), r.err * norm.to_f64()))
}

fn check_quad(r: &crate::quad::QuadResult, what: &str) -> Result<()> {
    if !r.converged || !r.value.re.is_finite() || !r.value.im.is_finite() {
        return Err(Error::Budget(format!("{what}: quadrature did not converge (estimate {:e})", r.err)));
    }
    Ok(())
}

/// `int_0^inf g(y, theta(alpha + i y)) dy`, split at `y = 1`.
fn split_ray(
    ex: &TwistedExpansion,
    drop_constant: bool,
    g: &(dyn Fn(&Float, &Cx) -> Cx + Sync),
    ctx: &PrecisionContext,
) -> Result<crate::quad::QuadResult> {
    let wp = ex.prec;
    let qctx = ctx.with_prec(wp);
    let nan = || Cx::new(Float::with_val(wp, f64::NAN), Float::new(wp));
    let f = |y: &Float| match ex.eval(y, drop_constant, &qctx) {
        Ok(th) => g(y, &th.value),
        Err(_) => nan(),
    };
    let zero = Float::new(wp);
    let one = Float::with_val(wp, 1);
    let tol = ctx.tol * 1e-3;
    let near = tanh_sinh(f, &zero, &one, wp, tol, ctx.max_quad_level + 2);
    check_quad(&near, "near part of the ray integral")?;
    let far = exp_sinh(|u| f(&Float::with_val(wp, u + 1u32)), wp, tol, ctx.max_quad_level);
    check_quad(&far, "far part of the ray integral")?;
    Ok(crate::quad::QuadResult {
        value: near.value + far.value,
        err: near.err + far.err,
        converged: true,
        nodes: near.nodes + far.nodes,
    })
}

/// Residual of a two-sided identity.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub lhs: Approx,
    pub rhs: Approx,
}

impl IdentityCheck {
    pub fn residual(&self) -> f64 {
        self.lhs.value.dist(&self.rhs.value)
    }
}

/// `theta^{(0)}_{0,4st,chi^{(n,m)}}(z)` against `sqrt(i/z) sum_{D} S theta^{(0)}_{0,4st,chi^{(n',m')}}(-1/z)`.
pub fn verify_modular_transform(p: ChiParams, z: &Cx, ctx: &PrecisionContext) -> Result<IdentityCheck> {
    let wp = ctx.prec + 16;
    let wctx = ctx.with_prec(wp);
    let z = z.with_prec(wp);
    let lhs = theta_upper_half(&chi_spec(p, 0)?, &z, &wctx)?;
    let w = z.recip().neg_ref();
    let pairs = pair_set(p.s, p.t)?;
    let mut acc = Cx::zero(wp);
    let mut err = 0.0;
    for &(n2, m2) in &pairs.pairs {
        let q = ChiParams::new(p.s, p.t, n2, m2)?;
        let th = theta_upper_half(&chi_spec(q, 0)?, &w, &wctx)?;
        let s = s_matrix_entry(p.s, p.t, (p.n, p.m), (n2, m2), wp);
        err += th.err * s.to_f64().abs();
        acc = acc + th.value.scale(&s);
    }
    let root = (&Cx::i(wp) / &z).sqrt();
    let rhs = &root * &acc;
    Ok(IdentityCheck {
        lhs: Approx::new(lhs.value.with_prec(ctx.prec), lhs.err),
        rhs: Approx::new(rhs.with_prec(ctx.prec), err * root.abs_f64()),
    })
}

/// `theta^{(nu)}_{0,4(2st)^2,chi~}(4st z)` against `-sqrt(st/8) sum_D S theta^{(nu)}_{0,4st,chi^{(n',m')}}(z)`.
pub fn verify_lift(p: ChiParams, z: &Cx, nu: u8, ctx: &PrecisionContext) -> Result<IdentityCheck> {
    let wp = ctx.prec + 16;
    let wctx = ctx.with_prec(wp);
    let z = z.with_prec(wp);
    let chi = chi_function(p)?;
    let lifted = ThetaSpec::tilde_of(&chi, nu)?;
    let lhs = theta_upper_half(&lifted, &z.scale(&Float::with_val(wp, 4 * p.s * p.t)), &wctx)?;
    let pairs = pair_set(p.s, p.t)?;
    let mut acc = Cx::zero(wp);
    let mut err = 0.0;
    for &(n2, m2) in &pairs.pairs {
        let q = ChiParams::new(p.s, p.t, n2, m2)?;
        let th = theta_upper_half(&chi_spec(q, nu)?, &z, &wctx)?;
        let s = s_matrix_entry(p.s, p.t, (p.n, p.m), (n2, m2), wp);
        err += th.err * s.to_f64().abs();
        acc = acc + th.value.scale(&s);
    }
    let norm = -(Float::with_val(wp, p.s * p.t) / 8u32).sqrt();
    let rhs = acc.scale(&norm);
    Ok(IdentityCheck {
        lhs: Approx::new(lhs.value.with_prec(ctx.prec), lhs.err),
        rhs: Approx::new(rhs.with_prec(ctx.prec), err * norm.to_f64().abs()),
    })
}

/// `Phi^_{n,m}(z) + (1/(iz))^{3/2} sum_D S Phi^_{n',m'}(-1/z)` against the period
/// function `r_{n,m}(z; 0)`, for `z` in the lower half-plane.
pub fn verify_period_identity(p: ChiParams, z: &Cx, ctx: &PrecisionContext) -> Result<IdentityCheck> {
    let wp = ctx.prec + 16;
    let wctx = ctx.with_prec(wp);
    let z = z.with_prec(wp);
    let w = z.recip().neg_ref();
    let phi = eichler_integral(p, &z, &EichlerLower::Conj, &wctx)?;
    let pairs = pair_set(p.s, p.t)?;
    let mut acc = Cx::zero(wp);
    let mut err = 0.0;
    for &(n2, m2) in &pairs.pairs {
        let q = ChiParams::new(p.s, p.t, n2, m2)?;
        let v = eichler_integral(q, &w, &EichlerLower::Conj, &wctx)?;
        let s = s_matrix_entry(p.s, p.t, (p.n, p.m), (n2, m2), wp);
        err += v.err * s.to_f64().abs();
        acc = acc + v.value.scale(&s);
    }
    let factor = z.mul_i().recip().powf(&Float::with_val(wp, 1.5));
    let lhs = &phi.value + &(&factor * &acc);
    let r = eichler_integral(p, &z, &EichlerLower::Rational(Rational::new()), &wctx)?;
    Ok(IdentityCheck {
        lhs: Approx::new(lhs.with_prec(ctx.prec), phi.err + err * factor.abs_f64()),
        rhs: Approx::new(r.value.with_prec(ctx.prec), r.err),
    })
}

/// Richardson extrapolation of `theta(alpha + i eps)` over `eps_k = eps_0 2^{-k}`:
/// an oracle for [`theta_radial_limit`] independent of the L-value formula.
pub fn radial_extrapolation(
    spec: &ThetaSpec,
    alpha: &Rational,
    eps0: f64,
    levels: usize,
    ctx: &PrecisionContext,
) -> Result<Approx> {
    let mut hs = Vec::with_capacity(levels);
    let mut ys = Vec::with_capacity(levels);
    for k in 0..levels {
        let e = Float::with_val(ctx.prec, eps0) >> k as u32;
        let tau = Cx::new(Float::with_val(ctx.prec, alpha), e.clone());
        ys.push(theta_upper_half(spec, &tau, ctx)?.value);
        hs.push(e);
    }
    let (v, err) = crate::extrapolate::richardson(&hs, &ys);
    Ok(Approx::new(v, err))
}
