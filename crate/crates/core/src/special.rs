//! Complex Dawson integral `D(y) = e^{-y^2} int_0^y e^{t^2} dt` and the kernel
//! `E(y) = (2 y^3 D(y) - y^2) / sqrt(pi)` of the median resummation.
//!
//! Two regimes: the Maclaurin series with enough guard bits to absorb its
//! cancellation, and the large-`|y|` expansion
//! `D(y) = (i sqrt(pi)/2) e^{-y^2} + (1/2y) sum_k (2k-1)!!/(2y^2)^k`, valid for
//! `0 <= arg y <= pi/4` (conjugate symmetry covers the lower half). The switch
//! happens once the asymptotic series alone can reach the working precision.

use rug::Float;

use crate::num::Cx;

/// `|y|^2` above which the asymptotic regime is used.
fn crossover(prec: u32) -> f64 {
    prec as f64 * std::f64::consts::LN_2 + 12.0
}

fn maclaurin_dawson(y: &Cx) -> Cx {
    let prec = y.prec();
    let r2 = y.norm_sqr().to_f64();
    let guard = (std::f64::consts::LOG2_E * r2).ceil() as u32 + 24;
    let wp = prec + guard;
    let y = y.with_prec(wp);
    let y2 = &y * &y;
    // term_k = (-1)^k 2^k y^{2k+1} / (2k+1)!!
    let mut term = y.clone();
    let mut acc = y.clone();
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut k: u32 = 1;
    loop {
        let factor = Float::with_val(wp, -2i32) / (2 * k + 1);
        term = (&term * &y2).scale(&factor);
        acc = acc + term.clone();
        if term.is_zero() || (k as f64 > r2 && term.abs() < Float::with_val(wp, acc.abs() * &eps)) {
            break;
        }
        k += 1;
    }
    acc.with_prec(prec)
}

/// `sum_{k>=start} (2k-1)!!/(2y^2)^k`, optimally truncated; returns the sum and
/// the magnitude of the first omitted term.
fn asymptotic_tail(y: &Cx, start: u32) -> (Cx, f64) {
    let prec = y.prec();
    let inv = (y * y).scale_f64(2.0).recip();
    // (2k-1)!!/(2y^2)^k built incrementally from k = 0
    let mut term = Cx::one(prec);
    for k in 1..=start {
        term = (&term * &inv).scale(&Float::with_val(prec, 2 * k - 1));
    }
    let mut acc = Cx::zero(prec);
    let mut prev = f64::INFINITY;
    let eps = 2f64.powi(-(prec as i32) - 8);
    let mut k = start;
    loop {
        let mag = term.abs_f64();
        if mag > prev {
            return (acc, prev);
        }
        acc = acc + term.clone();
        if mag <= eps * acc.abs_f64() {
            return (acc, mag);
        }
        prev = mag;
        k += 1;
        term = (&term * &inv).scale(&Float::with_val(prec, 2 * k - 1));
    }
}

/// Principal-sector pieces: reflect `y` into `Re y >= 0, Im y >= 0`.
fn reflect(y: &Cx) -> (Cx, bool, bool) {
    let neg = y.re.is_sign_negative() && !y.re.is_zero();
    let y1 = if neg { y.neg_ref() } else { y.clone() };
    let conj = y1.im.is_sign_negative() && !y1.im.is_zero();
    let y2 = if conj { y1.conj() } else { y1 };
    (y2, neg, conj)
}

fn use_asymptotic(y: &Cx) -> bool {
    let r2 = y.norm_sqr().to_f64();
    // the expansion holds for |arg y| <= pi/4; keep a margin from pi/2
    r2 >= crossover(y.prec()) && y.re.to_f64() >= 0.5 * y.im.to_f64().abs()
}

/// Dawson integral `D(y)` for complex `y`.
pub fn dawson(y: &Cx) -> Cx {
    let (z, neg, conj) = reflect(y);
    let mut d = if use_asymptotic(&z) {
        let prec = z.prec();
        let (s, _) = asymptotic_tail(&z, 0);
        let mut d = (&s / &z).scale_f64(0.5);
        if !z.im.is_zero() {
            let half_sqrt_pi = Float::with_val(prec, rug::float::Constant::Pi).sqrt() / 2u32;
            let e = (&z * &z).neg_ref().exp().scale(&half_sqrt_pi).mul_i();
            d = d + e;
        }
        d
    } else {
        maclaurin_dawson(&z)
    };
    if conj {
        d = d.conj();
    }
    if neg {
        d = d.neg_ref();
    }
    d
}

fn shifted_asymptotic(z: &Cx) -> Cx {
    let sqrt_pi = Float::with_val(z.prec(), rug::float::Constant::Pi).sqrt();
    let z2 = z * z;
    let (s, _) = asymptotic_tail(z, 2);
    let mut v = &z2 * &s;
    if !z.im.is_zero() {
        let z3 = &z2 * z;
        let e = (&z3 * &z2.neg_ref().exp()).scale(&sqrt_pi).mul_i();
        v = v + e;
    }
    v.scale(&sqrt_pi.recip())
}

fn shifted_maclaurin(z: &Cx) -> Cx {
    let prec = z.prec();
    let wp = prec + 16;
    let zz = z.with_prec(wp);
    let d = maclaurin_dawson(&zz);
    let z2 = &zz * &zz;
    let z3 = &z2 * &zz;
    let sp = Float::with_val(wp, rug::float::Constant::Pi).sqrt();
    let e = (&(&z3 * &d).scale_f64(2.0) - &z2).scale(&Float::with_val(wp, sp.recip_ref()));
    let half = Float::with_val(wp, 2u32 * &sp).recip();
    Cx::new(e.re - half, e.im).with_prec(prec)
}

/// `E(y) - 1/(2 sqrt(pi))`, computed without cancellation for large `|y|`.
///
/// `E` is even, so `y` is first moved into `Re y >= 0`.
pub fn special_e_shifted(y: &Cx) -> Cx {
    let (z, _, conj) = reflect(y);
    let out = if use_asymptotic(&z) {
        shifted_asymptotic(&z)
    } else {
        shifted_maclaurin(&z)
    };
    if conj {
        out.conj()
    } else {
        out
    }
}

/// `E(y) = (2 y^3 D(y) - y^2) / sqrt(pi)`.
pub fn special_e(y: &Cx) -> Cx {
    let prec = y.prec();
    let half = Float::with_val(prec, rug::float::Constant::Pi).sqrt().recip() / 2u32;
    let s = special_e_shifted(y);
    Cx::new(s.re + half, s.im)
}
