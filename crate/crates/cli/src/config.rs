//! Family configurations and their expansion into core objects.

use std::path::Path;

use rug::Rational;
use serde::{Deserialize, Serialize};

use resurgence::habiro::{hikami_theta_spec, StrangeFamily};
use resurgence::periodic::{chi_function, make_periodic, pair_set, ChiParams};
use resurgence::qseries::ThetaSpec;
use resurgence::PrecisionContext;

use crate::UsageError;

pub const DEFAULT_PREC: u32 = 128;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    General {
        c: String,
        #[serde(rename = "M")]
        modulus: i64,
        k1: i64,
        k2: i64,
        a: i64,
        b: i64,
    },
    Chi {
        s: i64,
        t: i64,
        n: i64,
        m: i64,
        #[serde(default = "default_chi_scale")]
        c: String,
    },
    Hikami {
        u: usize,
        #[serde(alias = "ℓ")]
        l: usize,
    },
    #[serde(rename = "t3-2k")]
    T32k { k: u32 },
}

fn default_chi_scale() -> String {
    "1".into()
}

/// A JSON configuration file: the family plus optional numerical settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(flatten)]
    pub family: FamilyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell_cap: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))
    }
}

/// A validated family: the theta series whose asymptotics are studied, plus
/// the extra structure some suites need.
#[derive(Debug, Clone)]
pub struct Family {
    pub config: FamilyConfig,
    pub spec: ThetaSpec,
    /// Character indices, normalized into the index set `D(s, t)`.
    pub chi: Option<ChiParams>,
    pub strange: Option<StrangeFamily>,
}

impl Family {
    pub fn label(&self) -> String {
        match &self.config {
            FamilyConfig::General { c, modulus, k1, k2, a, b } => {
                format!("general(c={c}, M={modulus}, k1={k1}, k2={k2}, a={a}, b={b})")
            }
            FamilyConfig::Chi { s, t, n, m, c } => format!("chi(s={s}, t={t}, n={n}, m={m}, c={c})"),
            FamilyConfig::Hikami { u, l } => format!("hikami(u={u}, l={l})"),
            FamilyConfig::T32k { k } => format!("t3-2k(k={k})"),
        }
    }

    /// `a` and `b` of the theta series.
    pub fn ab(&self) -> (i64, i64) {
        (self.spec.a(), self.spec.b())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, UsageError> {
    let t = s.trim().replace('\u{2212}', "-");
    Rational::parse(&t)
        .map(Rational::from)
        .map_err(|_| UsageError(format!("cannot parse '{s}' as a rational j/N")))
}

fn core(e: resurgence::Error) -> UsageError {
    UsageError(e.to_string())
}

/// `(n, m)` or its partner `(s - n, t - m)`, whichever lies in `D(s, t)`;
/// both give the same character.
fn normalize_pair(p: ChiParams) -> Option<ChiParams> {
    let d = pair_set(p.s, p.t).ok()?;
    if d.contains((p.n, p.m)) {
        Some(p)
    } else {
        let q = p.partner();
        d.contains((q.n, q.m)).then_some(q)
    }
}

impl FamilyConfig {
    pub fn resolve(&self) -> Result<Family, UsageError> {
        let (spec, chi, strange) = match self {
            FamilyConfig::General { c, modulus, k1, k2, a, b } => {
                let c = parse_rational(c)?;
                let f = make_periodic(c, *modulus, *k1, *k2).map_err(core)?;
                let spec = ThetaSpec::periodic(*a, *b, 1, f.clone()).map_err(core)?;
                let trefoil = make_periodic(Rational::from((-1, 2)), 12, 1, 5).map_err(core)?;
                let strange = (f == trefoil && *a == 1 && *b == 24).then_some(StrangeFamily::Trefoil);
                (spec, None, strange)
            }
            FamilyConfig::Chi { s, t, n, m, c } => {
                let p = ChiParams::new(*s, *t, *n, *m).map_err(core)?;
                let f = chi_function(p).map_err(core)?.with_scale(parse_rational(c)?).map_err(core)?;
                let spec = ThetaSpec::periodic(0, 4 * s * t, 1, f).map_err(core)?;
                (spec, normalize_pair(p), None)
            }
            FamilyConfig::Hikami { u, l } => {
                let spec = hikami_theta_spec(*u, *l).map_err(core)?;
                let p = ChiParams::new(2, 2 * *u as i64 + 1, 1, *l as i64 + 1).map_err(core)?;
                (spec, normalize_pair(p), Some(StrangeFamily::Hikami { u: *u, l: *l }))
            }
            FamilyConfig::T32k { k } => {
                if *k < 1 || *k > 20 {
                    return Err(UsageError(format!("t3-2k needs 1 <= k <= 20, got {k}")));
                }
                let t = 1i64 << k;
                let p = ChiParams::new(3, t, 2, 1).map_err(core)?;
                let f = chi_function(p).map_err(core)?.with_scale(Rational::from((-1, 2))).map_err(core)?;
                let a = (2 * t - 3).pow(2);
                let spec = ThetaSpec::periodic(a, 12 * t, 1, f).map_err(core)?;
                (spec, normalize_pair(p), None)
            }
        };
        Ok(Family {
            config: self.clone(),
            spec,
            chi,
            strange,
        })
    }
}

/// Precision from the flag, then the config file, then the environment
/// (handled by clap), then the default.
pub fn context(prec: Option<u32>, tol: Option<f64>, config: Option<&Config>) -> Result<PrecisionContext, UsageError> {
    let prec = prec.or(config.and_then(|c| c.precision)).unwrap_or(DEFAULT_PREC);
    let tol = tol.or(config.and_then(|c| c.tolerance)).unwrap_or(DEFAULT_TOL);
    let mut ctx = PrecisionContext::new(prec, tol);
    if let Some(cap) = config.and_then(|c| c.ell_cap) {
        ctx.ell_cap = cap;
    }
    ctx.validate().map_err(core)?;
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hikami_expansion_matches_chi_family() {
        let h = FamilyConfig::Hikami { u: 2, l: 1 }.resolve().unwrap();
        assert_eq!(h.ab(), (1, 40));
        let p = h.chi.unwrap();
        assert_eq!((p.s, p.t, p.n, p.m), (2, 5, 1, 2));
    }

    #[test]
    fn t3_2k_with_k1_is_the_trefoil_series() {
        let t = FamilyConfig::T32k { k: 1 }.resolve().unwrap();
        let h = FamilyConfig::Hikami { u: 1, l: 0 }.resolve().unwrap();
        assert_eq!(t.ab(), h.ab());
        assert_eq!(t.spec.periodic_fn(), h.spec.periodic_fn());
    }

    #[test]
    fn config_json_roundtrip() {
        let text = r#"{"family": "chi", "s": 3, "t": 4, "n": 1, "m": 2, "precision": 96}"#;
        let c: Config = serde_json::from_str(text).unwrap();
        assert_eq!(c.precision, Some(96));
        assert!(matches!(c.family, FamilyConfig::Chi { s: 3, t: 4, n: 1, m: 2, .. }));
        let back: Config = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rationals_parse_with_unicode_minus() {
        assert_eq!(parse_rational("\u{2212}1/2").unwrap(), Rational::from((-1, 2)));
        assert!(parse_rational("x").is_err());
    }
}
