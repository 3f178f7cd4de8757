//! Report records and their JSON/CSV serialization.
//!
//! Reports are byte-deterministic: checks keep declaration order, inputs are
//! ordered pairs, and floats are printed from their MPFR digits.

use std::io::Write;

use rug::Float;
use serde::Serialize;

use resurgence::{Approx, Cx};

/// A complex number as decimal strings, avoiding a round trip through `f64`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Num {
    pub re: String,
    pub im: String,
    pub err: String,
}

/// Decimal digits carried by `prec` bits.
pub fn digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).floor() as usize
}

pub fn float_str(x: &Float) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits(x.prec())))
}

pub fn err_str(err: f64) -> String {
    format!("{err:.3e}")
}

impl Num {
    pub fn new(value: &Cx, err: f64) -> Self {
        Self {
            re: float_str(&value.re),
            im: float_str(&value.im),
            err: err_str(err),
        }
    }

    pub fn exact(value: &Cx) -> Self {
        Self::new(value, 0.0)
    }

    pub fn approx(a: &Approx) -> Self {
        Self::new(&a.value, a.err)
    }
}

/// Serializes ordered pairs as a JSON object, keeping their order.
pub fn ordered_map<S: serde::Serializer>(pairs: &[(String, String)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(pairs.len()))?;
    for (k, v) in pairs {
        m.serialize_entry(k, v)?;
    }
    m.end()
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "ordered_map")]
    pub inputs: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Num>,
    /// `None` when the check errored before producing both sides.
    pub abs_error: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub suite: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped_suites: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub family: String,
    pub precision: u32,
    pub tolerance: f64,
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: &str, family: String, precision: u32, tolerance: f64, checks: Vec<Check>, skipped: Vec<Skipped>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let summary = Summary {
            total: checks.len(),
            passed,
            failed: checks.len() - passed,
            skipped_suites: skipped.len(),
        };
        Self {
            suite: suite.into(),
            family,
            precision,
            tolerance,
            checks,
            skipped,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn write_json<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = out;
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    /// One row per check with a stable column order.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "name", "inputs", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_error", "tolerance", "pass",
        ])?;
        for c in &self.checks {
            let inputs = c.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
            let side = |n: &Option<Num>| n.as_ref().map(|n| (n.re.clone(), n.im.clone())).unwrap_or_default();
            let (lr, li) = side(&c.lhs);
            let (rr, ri) = side(&c.rhs);
            w.write_record([
                c.name.clone(),
                inputs,
                lr,
                li,
                rr,
                ri,
                c.abs_error.map(err_str).unwrap_or_default(),
                err_str(c.tolerance),
                c.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable lines for stderr.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let status = if c.pass { "PASS" } else { "FAIL" };
                let detail = match (&c.error, c.abs_error) {
                    (Some(e), _) => format!("error: {e}"),
                    (None, Some(a)) => format!("abs_error {} (tol {})", err_str(a), err_str(c.tolerance)),
                    (None, None) => String::new(),
                };
                format!("[{status}] {}: {detail}", c.name)
            })
            .collect();
        for s in &self.skipped {
            lines.push(format!("[SKIP] {}: {}", s.suite, s.reason));
        }
        lines.push(format!(
            "{} checks: {} passed, {} failed",
            self.summary.total, self.summary.passed, self.summary.failed
        ));
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_full_precision() {
        let v = Cx::new(Float::with_val(128, 1) / 3u32, Float::new(128));
        let n = Num::exact(&v);
        assert!(n.re.starts_with("3.333333333333333333333333333333333333"));
        assert_eq!(n.im, "0");
        assert_eq!(n.err, "0.000e0");
    }

    #[test]
    fn summary_counts() {
        let mk = |pass| Check {
            name: "x".into(),
            inputs: vec![],
            lhs: None,
            rhs: None,
            abs_error: Some(0.0),
            tolerance: 1e-8,
            pass,
            note: None,
            error: None,
            wall_time: None,
        };
        let r = Report::new("s", "f".into(), 128, 1e-8, vec![mk(true), mk(false)], vec![]);
        assert_eq!((r.summary.passed, r.summary.failed), (1, 1));
        assert!(!r.all_pass());
    }
}
