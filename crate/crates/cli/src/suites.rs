//! Verification suites: each expands into a list of independent checks that
//! run concurrently and are reported in declaration order.

use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use rug::{Float, Rational};

use resurgence::borel::{bernoulli_form_coefficients, borel_coefficients, hadamard_oracle, BorelClosedForm, HADAMARD_MAX};
use resurgence::exact::{series_coefficients, FormalSeries};
use resurgence::habiro::verify_strange;
use resurgence::periodic::{chi_function, pair_set, verify_decomposition, ChiParams};
use resurgence::qseries::{eichler_boundary, theta_radial_limit, verify_period_identity, ThetaSpec, TwistedExpansion};
use resurgence::resum::{boundary_median, constant_from_tilde, discontinuity};
use resurgence::{Cx, PrecisionContext};

use crate::config::Family;
use crate::report::{Check, Num, Skipped};
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Coeffs,
    Borel,
    Disc,
    Cm,
    Gentor,
    Strange,
    Main2,
    Eichler,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Coeffs => "coeffs",
            Suite::Borel => "borel",
            Suite::Disc => "disc",
            Suite::Cm => "cm",
            Suite::Gentor => "gentor",
            Suite::Strange => "strange",
            Suite::Main2 => "main2",
            Suite::Eichler => "eichler",
            Suite::All => "all",
        }
    }

    const EACH: [Suite; 8] = [
        Suite::Coeffs,
        Suite::Borel,
        Suite::Disc,
        Suite::Cm,
        Suite::Gentor,
        Suite::Strange,
        Suite::Main2,
        Suite::Eichler,
    ];

    /// Why the suite cannot run on this family, if it cannot.
    fn unavailable(self, family: &Family) -> Option<String> {
        match self {
            Suite::Gentor | Suite::Eichler if family.chi.is_none() => {
                Some(format!("suite {} needs a character family (chi, hikami or t3-2k)", self.name()))
            }
            Suite::Strange if family.strange.is_none() => Some(
                "suite strange needs family hikami or the trefoil configuration of family general".into(),
            ),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub alphas: Option<Vec<Rational>>,
    pub xs: Option<Vec<Cx>>,
    pub zs: Option<Vec<Cx>>,
    pub count: usize,
    pub timings: bool,
}

/// Both sides of an identity and how to compare them.
struct Sides {
    lhs: Num,
    rhs: Num,
    abs_error: f64,
    failure: Option<String>,
}

impl Sides {
    fn compare(lhs: &Cx, lhs_err: f64, rhs: &Cx, rhs_err: f64) -> Self {
        Self {
            lhs: Num::new(lhs, lhs_err),
            rhs: Num::new(rhs, rhs_err),
            abs_error: lhs.dist(rhs),
            failure: None,
        }
    }

    /// `|lhs - rhs| / max(1, |rhs|)`.
    fn relative(lhs: &Cx, rhs: &Cx) -> Self {
        let scale = rhs.abs_f64().max(1.0);
        Self {
            abs_error: lhs.dist(rhs) / scale,
            ..Self::compare(lhs, 0.0, rhs, 0.0)
        }
    }
}

type Runner = Box<dyn Fn() -> resurgence::Result<Sides> + Send + Sync>;

struct Pending {
    name: String,
    inputs: Vec<(String, String)>,
    note: Option<String>,
    run: Runner,
}

impl Pending {
    fn new(name: impl Into<String>, inputs: Vec<(&str, String)>, run: Runner) -> Self {
        Self {
            name: name.into(),
            inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            note: None,
            run,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn cx_str(z: &Cx) -> String {
    let (re, im) = z.to_f64();
    if im == 0.0 {
        format!("{re}")
    } else {
        format!("{re}{im:+}i")
    }
}

fn series(family: &Family, count: usize) -> Result<FormalSeries, UsageError> {
    series_coefficients(&family.spec, count).map_err(|e| UsageError(e.to_string()))
}

fn default_alphas(pairs: &[(i64, i64)]) -> Vec<Rational> {
    pairs.iter().map(|&p| Rational::from(p)).collect()
}

fn coeffs(family: &Family, ctx: &PrecisionContext, opts: &SuiteOptions) -> Result<Vec<Pending>, UsageError> {
    let series = series(family, opts.count)?;
    let ex = std::sync::Arc::new(
        TwistedExpansion::new(&family.spec, &Rational::new(), ctx.prec).map_err(|e| UsageError(e.to_string()))?,
    );
    Ok((0..opts.count)
        .map(|n| {
            let exact = series.c(n).clone();
            let ex = ex.clone();
            let prec = ctx.prec;
            Pending::new(
                format!("coeffs C_{n}"),
                vec![("n", n.to_string()), ("exact", exact.to_string())],
                Box::new(move || {
                    let lhs = Cx::real(Float::with_val(prec, &exact));
                    let l = ex.l_value(2 * n as u32 + 1);
                    let rhs = if n % 2 == 0 { l } else { l.neg_ref() };
                    Ok(Sides::relative(&lhs, &rhs))
                }),
            )
            .with_note("exact Bernoulli sum vs numeric L-value from period moments; relative error")
        })
        .collect())
}

fn borel(family: &Family, ctx: &PrecisionContext, opts: &SuiteOptions) -> Result<Vec<Pending>, UsageError> {
    let count = opts.count;
    let series = series(family, count.max(HADAMARD_MAX) + 4)?;
    let prec = ctx.prec;
    let mut out = Vec::new();
    for n in 0..count {
        let series = series.clone();
        out.push(
            Pending::new(
                format!("borel taylor g_{n}"),
                vec![("n", n.to_string())],
                Box::new(move || {
                    let g = borel_coefficients(&series, n + 1)?;
                    let exact = Cx::real(Float::with_val(prec, &g[n]));
                    let closed = BorelClosedForm::new(&series).taylor_coefficient(n as u32, prec);
                    Ok(Sides::relative(&Cx::real(closed), &exact))
                }),
            )
            .with_note("closed-form Taylor coefficient vs exact Borel coefficient; relative error"),
        );
    }
    let hcount = count.min(HADAMARD_MAX);
    let s2 = series.clone();
    out.push(
        Pending::new(
            "borel hadamard",
            vec![("count", hcount.to_string())],
            Box::new(move || {
                let h = hadamard_oracle(&s2, hcount)?;
                let g = borel_coefficients(&s2, hcount)?;
                Ok(exact_vectors(&h.product, &g, prec))
            }),
        )
        .with_note("termwise product of the two factor series vs Borel coefficients, exact rationals"),
    );
    out.push(
        Pending::new(
            "borel bernoulli-form",
            vec![("count", count.to_string())],
            Box::new(move || {
                let a = bernoulli_form_coefficients(&series, count);
                let g = borel_coefficients(&series, count)?;
                Ok(exact_vectors(&a, &g, prec))
            }),
        )
        .with_note("second Bernoulli-polynomial form vs Borel coefficients, exact rationals"),
    );
    Ok(out)
}

/// Compares two rational vectors; the sides report the first mismatch.
fn exact_vectors(a: &[Rational], b: &[Rational], prec: u32) -> Sides {
    let at = a.iter().zip(b).position(|(x, y)| x != y);
    let k = at.unwrap_or(0);
    let lhs = Cx::real(Float::with_val(prec, &a[k]));
    let rhs = Cx::real(Float::with_val(prec, &b[k]));
    let mut s = Sides::compare(&lhs, 0.0, &rhs, 0.0);
    if let Some(k) = at {
        s.abs_error = s.abs_error.max(f64::MIN_POSITIVE);
        s.failure = Some(format!("first rational mismatch at n = {k}"));
    } else if a.len() != b.len() {
        s.failure = Some(format!("length mismatch {} vs {}", a.len(), b.len()));
    }
    s
}

fn disc(family: &Family, ctx: &PrecisionContext, opts: &SuiteOptions) -> Result<Vec<Pending>, UsageError> {
    let series = series(family, 4)?;
    let xs = opts.xs.clone().unwrap_or_else(|| {
        vec![
            Cx::from_f64(ctx.prec, 0.5, 0.0),
            Cx::from_f64(ctx.prec, 1.0, 0.0),
            Cx::from_f64(ctx.prec, 1.0, 0.25),
        ]
    });
    Ok(xs
        .into_iter()
        .map(|x| {
            let (series, ctx) = (series.clone(), ctx.clone());
            Pending::new(
                format!("disc x={}", cx_str(&x)),
                vec![("x", cx_str(&x))],
                Box::new(move || {
                    let d = discontinuity(&series, &x, &ctx)?;
                    Ok(Sides::compare(&d.numeric.value, d.numeric.err, &d.closed_form.value, d.closed_form.err))
                }),
            )
            .with_note("S+ - S- by quadrature vs the theta closed form")
        })
        .collect())
}

fn cm(family: &Family, ctx: &PrecisionContext) -> Result<Vec<Pending>, UsageError> {
    let series = series(family, 1)?;
    let prec = ctx.prec;
    Ok(vec![Pending::new(
        "cm",
        vec![("C_M", series.c_m().to_string())],
        Box::new(move || {
            let c = constant_from_tilde(&series, prec);
            let exact = Cx::real(Float::with_val(prec, series.c_m()));
            Ok(Sides::compare(&c.value, c.err, &exact, 0.0))
        }),
    )
    .with_note("(2Mc/pi^2) L(2, f~) vs the exact Bernoulli constant")])
}

fn gentor(family: &Family, ctx: &PrecisionContext) -> Result<Vec<Pending>, UsageError> {
    let p = family.chi.expect("checked by unavailable()");
    let pairs = pair_set(p.s, p.t).map_err(|e| UsageError(e.to_string()))?;
    Ok(pairs
        .pairs
        .into_iter()
        .map(|pair| {
            let ctx = ctx.clone();
            let (s, t) = (p.s, p.t);
            Pending::new(
                format!("gentor ({},{})", pair.0, pair.1),
                vec![("s", s.to_string()), ("t", t.to_string()), ("n", pair.0.to_string()), ("m", pair.1.to_string())],
                Box::new(move || {
                    let r = verify_decomposition(s, t, pair, &ctx)?;
                    let zero = Cx::zero(ctx.prec);
                    let worst = Cx::from_f64(ctx.prec, r.max_residual, 0.0);
                    let mut sides = Sides::compare(&worst, 0.0, &zero, 0.0);
                    if !r.support_violations.is_empty() {
                        sides.failure = Some(format!("support violations at k = {:?}", r.support_violations));
                    }
                    Ok(sides)
                }),
            )
            .with_note("lhs is the largest mismatch of the tilde decomposition over all residues mod 2st")
        })
        .collect())
}

fn strange(family: &Family, ctx: &PrecisionContext, opts: &SuiteOptions) -> Result<Vec<Pending>, UsageError> {
    let fam = family.strange.expect("checked by unavailable()");
    let alphas = opts
        .alphas
        .clone()
        .unwrap_or_else(|| default_alphas(&[(1, 1), (1, 2), (1, 3), (2, 5), (3, 7)]));
    Ok(alphas
        .into_iter()
        .map(|alpha| {
            let ctx = ctx.clone();
            Pending::new(
                format!("strange alpha={alpha}"),
                vec![("alpha", alpha.to_string())],
                Box::new(move || {
                    let r = verify_strange(fam, &alpha, &ctx)?;
                    let mut s = Sides::compare(&r.lhs, 0.0, &r.rhs, 0.0);
                    s.abs_error = r.residual;
                    Ok(s)
                }),
            )
            .with_note("q-series value at e^{2 pi i alpha} vs the radial limit of the partial theta series")
        })
        .collect())
}

fn main2(family: &Family, ctx: &PrecisionContext, opts: &SuiteOptions) -> Result<Vec<Pending>, UsageError> {
    let series = series(family, 4)?;
    let (a, b) = family.ab();
    let alphas = opts.alphas.clone().unwrap_or_else(|| default_alphas(&[(1, 1), (1, 2), (-1, 2)]));
    Ok(alphas
        .into_iter()
        .map(|alpha| {
            let (series, ctx, spec) = (series.clone(), ctx.clone(), family.spec.clone());
            let p = Pending::new(
                format!("main2 alpha={alpha}"),
                vec![("alpha", alpha.to_string())],
                Box::new(move || {
                    let lhs = boundary_median(&series, &alpha, &ctx)?;
                    let lim = theta_radial_limit(&spec, &alpha, &ctx)?;
                    // the median sum sees the series without the shift a: restore q^{a/b}
                    let phase_num = &alpha * Rational::from((a, b));
                    let phase = root_of_unity_q(&phase_num, ctx.prec);
                    let rhs = &phase * &lim;
                    Ok(Sides::compare(&lhs.value, lhs.err, &rhs, 0.0))
                }),
            );
            if a != 0 {
                p.with_note(format!("rhs includes the root of unity e^(2 pi i alpha {a}/{b})"))
            } else {
                p
            }
        })
        .collect())
}

/// `e^{2 pi i r}` with `r` reduced exactly.
fn root_of_unity_q(r: &Rational, prec: u32) -> Cx {
    let den = r.denom().to_u64().expect("denominator fits in u64");
    let num = Rational::from(r.numer() % r.denom()).numer().to_i64().expect("numerator fits in i64");
    Cx::root_of_unity(num.rem_euclid(den as i64), den, prec)
}

fn eichler(family: &Family, ctx: &PrecisionContext, opts: &SuiteOptions) -> Result<Vec<Pending>, UsageError> {
    let p: ChiParams = family.chi.expect("checked by unavailable()");
    let mut out = Vec::new();
    let alphas = opts.alphas.clone().unwrap_or_else(|| default_alphas(&[(1, 1), (1, 2)]));
    for alpha in alphas {
        let ctx = ctx.clone();
        out.push(
            Pending::new(
                format!("eichler boundary alpha={alpha}"),
                vec![("alpha", alpha.to_string())],
                Box::new(move || {
                    let lhs = eichler_boundary(p, &alpha, &ctx)?;
                    let spec = ThetaSpec::periodic(0, 4 * p.s * p.t, 1, chi_function(p)?)?;
                    let rhs = theta_radial_limit(&spec, &alpha, &ctx)?.scale_f64(-0.5);
                    Ok(Sides::compare(&lhs.value, lhs.err, &rhs, 0.0))
                }),
            )
            .with_note("boundary value of the non-holomorphic Eichler integral vs -1/2 times the radial limit"),
        );
    }
    let zs = opts
        .zs
        .clone()
        .unwrap_or_else(|| vec![Cx::from_f64(ctx.prec, 0.0, -1.0), Cx::from_f64(ctx.prec, 0.3, -0.8)]);
    for z in zs {
        let ctx = ctx.clone();
        out.push(
            Pending::new(
                format!("eichler period z={}", cx_str(&z)),
                vec![("z", cx_str(&z))],
                Box::new(move || {
                    let r = verify_period_identity(p, &z, &ctx)?;
                    Ok(Sides::compare(&r.lhs.value, r.lhs.err, &r.rhs.value, r.rhs.err))
                }),
            )
            .with_note("Eichler integral plus its S-transform vs the period function from 0"),
        );
    }
    Ok(out)
}

fn plan(suite: Suite, family: &Family, ctx: &PrecisionContext, opts: &SuiteOptions) -> Result<Vec<Pending>, UsageError> {
    match suite {
        Suite::Coeffs => coeffs(family, ctx, opts),
        Suite::Borel => borel(family, ctx, opts),
        Suite::Disc => disc(family, ctx, opts),
        Suite::Cm => cm(family, ctx),
        Suite::Gentor => gentor(family, ctx),
        Suite::Strange => strange(family, ctx, opts),
        Suite::Main2 => main2(family, ctx, opts),
        Suite::Eichler => eichler(family, ctx, opts),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

fn execute(p: &Pending, tol: f64, timings: bool) -> Check {
    let start = Instant::now();
    let outcome = (p.run)();
    let wall_time = timings.then(|| start.elapsed().as_secs_f64());
    let mut check = Check {
        name: p.name.clone(),
        inputs: p.inputs.clone(),
        lhs: None,
        rhs: None,
        abs_error: None,
        tolerance: tol,
        pass: false,
        note: p.note.clone(),
        error: None,
        wall_time,
    };
    match outcome {
        Ok(s) => {
            check.pass = s.failure.is_none() && s.abs_error <= tol;
            check.lhs = Some(s.lhs);
            check.rhs = Some(s.rhs);
            check.abs_error = s.abs_error.is_finite().then_some(s.abs_error);
            check.error = s.failure;
        }
        Err(e) => check.error = Some(e.to_string()),
    }
    check
}

/// Expands the suite, runs every check and returns them in declaration order.
pub fn run_suite(
    suite: Suite,
    family: &Family,
    ctx: &PrecisionContext,
    opts: &SuiteOptions,
) -> Result<(Vec<Check>, Vec<Skipped>), UsageError> {
    let mut skipped = Vec::new();
    let mut pending = Vec::new();
    if suite == Suite::All {
        for s in Suite::EACH {
            match s.unavailable(family) {
                Some(reason) => skipped.push(Skipped {
                    suite: s.name().into(),
                    reason,
                }),
                None => pending.extend(plan(s, family, ctx, opts)?),
            }
        }
    } else {
        if let Some(reason) = suite.unavailable(family) {
            return Err(UsageError(reason));
        }
        pending = plan(suite, family, ctx, opts)?;
    }
    let checks = pending.par_iter().map(|p| execute(p, ctx.tol, opts.timings)).collect();
    Ok((checks, skipped))
}
