//! Single-point evaluations.

use std::io::Write;

use clap::ValueEnum;
use rug::{Float, Rational};
use serde::Serialize;

use resurgence::borel::{BorelClosedForm, Side};
use resurgence::exact::series_coefficients;
use resurgence::qseries::{theta_radial_limit, theta_upper_half};
use resurgence::resum::{boundary_median, lateral_sum, median_sum};
use resurgence::{Approx, Cx, PrecisionContext};

use crate::config::Family;
use crate::report::Num;
use crate::{core_error, CliError, UsageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    /// Partial theta series at `--at` in the upper half-plane.
    Theta,
    /// Radial limit of the partial theta series at `--alpha`.
    ThetaLimit,
    /// Borel transform at `--at` (`--side` on the cut).
    Borel,
    /// Lateral Laplace sum at `--at` on `--side`.
    Lateral,
    /// Median sum at `--at`, `Re > 0`.
    Median,
    /// Boundary value of the median sum at `x = -1/(2 pi i alpha)`.
    BoundaryMedian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Plus,
    Minus,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Plus => Side::Plus,
            SideArg::Minus => Side::Minus,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub what: String,
    pub family: String,
    pub precision: u32,
    #[serde(serialize_with = "crate::report::ordered_map")]
    pub inputs: Vec<(String, String)>,
    pub value: Num,
}

impl Evaluation {
    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["what", "inputs", "re", "im", "err"])?;
        let inputs = self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        w.write_record([&self.what, &inputs, &self.value.re, &self.value.im, &self.value.err])?;
        w.flush()?;
        Ok(())
    }
}

/// Parses `re`, `re,im` or `re+imi` / `re-imi` at the given precision.
pub fn parse_complex(s: &str, prec: u32) -> Result<Cx, UsageError> {
    let bad = || UsageError(format!("cannot parse '{s}' as a complex number (use re,im)"));
    let t = s.trim().replace('\u{2212}', "-");
    let float = |x: &str| Float::parse(x.trim()).map(|v| Float::with_val(prec, v)).map_err(|_| bad());
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Cx::new(float(re)?, float(im)?));
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let cut = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        return match cut {
            Some(k) => {
                let im = &body[k..];
                let im = if im == "+" || im == "-" { format!("{im}1") } else { im.to_string() };
                Ok(Cx::new(float(&body[..k])?, float(&im)?))
            }
            None => {
                let im = if body.is_empty() || body == "+" || body == "-" { format!("{body}1") } else { body.to_string() };
                Ok(Cx::new(Float::new(prec), float(&im)?))
            }
        };
    }
    Ok(Cx::new(float(&t)?, Float::new(prec)))
}

pub struct EvalInputs {
    pub at: Option<Cx>,
    pub alpha: Option<Rational>,
    pub side: Option<SideArg>,
}

pub fn evaluate(kind: EvalKind, family: &Family, inputs: &EvalInputs, ctx: &PrecisionContext) -> Result<Evaluation, CliError> {
    let need_at = || inputs.at.clone().ok_or_else(|| UsageError("this evaluation needs --at".into()));
    let need_alpha = || inputs.alpha.clone().ok_or_else(|| UsageError("this evaluation needs --alpha".into()));
    let core = core_error;
    let series = || series_coefficients(&family.spec, 4).map_err(core);
    let mut record = Vec::new();
    let value: Approx = match kind {
        EvalKind::Theta => {
            let tau = need_at()?;
            record.push(("tau", Num::exact(&tau).re + "," + &Num::exact(&tau).im));
            theta_upper_half(&family.spec, &tau, ctx).map_err(core)?
        }
        EvalKind::ThetaLimit => {
            let alpha = need_alpha()?;
            record.push(("alpha", alpha.to_string()));
            Approx::new(theta_radial_limit(&family.spec, &alpha, ctx).map_err(core)?, 0.0)
        }
        EvalKind::Borel => {
            let p = need_at()?;
            record.push(("p", Num::exact(&p).re + "," + &Num::exact(&p).im));
            if let Some(s) = inputs.side {
                record.push(("side", format!("{s:?}").to_lowercase()));
            }
            BorelClosedForm::new(&series()?)
                .eval(&p, inputs.side.map(Side::from), ctx)
                .map_err(core)?
        }
        EvalKind::Lateral => {
            let x = need_at()?;
            let side = inputs.side.ok_or_else(|| UsageError("lateral sums need --side plus|minus".into()))?;
            record.push(("x", Num::exact(&x).re + "," + &Num::exact(&x).im));
            record.push(("side", format!("{side:?}").to_lowercase()));
            lateral_sum(&series()?, &x, side.into(), ctx).map_err(core)?.approx()
        }
        EvalKind::Median => {
            let x = need_at()?;
            record.push(("x", Num::exact(&x).re + "," + &Num::exact(&x).im));
            median_sum(&series()?, &x, ctx).map_err(core)?.approx()
        }
        EvalKind::BoundaryMedian => {
            let alpha = need_alpha()?;
            record.push(("alpha", alpha.to_string()));
            boundary_median(&series()?, &alpha, ctx).map_err(core)?
        }
    };
    Ok(Evaluation {
        what: kind.to_possible_value().expect("no skipped variants").get_name().to_string(),
        family: family.label(),
        precision: ctx.prec,
        inputs: record.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        value: Num::approx(&value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let p = 64;
        let z = parse_complex("1,0.25", p).unwrap();
        assert_eq!(z.to_f64(), (1.0, 0.25));
        assert_eq!(parse_complex("1+0.25i", p).unwrap().to_f64(), (1.0, 0.25));
        assert_eq!(parse_complex("-i", p).unwrap().to_f64(), (0.0, -1.0));
        assert_eq!(parse_complex("2e-3-1e+2i", p).unwrap().to_f64(), (2e-3, -100.0));
        assert_eq!(parse_complex("3", p).unwrap().to_f64(), (3.0, 0.0));
        assert!(parse_complex("abc", p).is_err());
    }
}
