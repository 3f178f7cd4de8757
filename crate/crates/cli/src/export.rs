//! Series exports: exact rationals as strings, floats at context precision.

use std::io::Write;

use clap::ValueEnum;
use rug::Float;
use serde::Serialize;

use resurgence::borel::{borel_coefficients, singularity_set, BorelClosedForm};
use resurgence::exact::series_coefficients;
use resurgence::PrecisionContext;

use crate::config::Family;
use crate::report::float_str;
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Coefficients,
    BorelTaylor,
    Singularities,
}

impl ExportKind {
    fn name(self) -> &'static str {
        match self {
            ExportKind::Coefficients => "coefficients",
            ExportKind::BorelTaylor => "borel-taylor",
            ExportKind::Singularities => "singularities",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub what: String,
    pub family: String,
    pub precision: u32,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn export(kind: ExportKind, family: &Family, count: usize, ctx: &PrecisionContext) -> Result<Table, UsageError> {
    if count == 0 {
        return Err(UsageError("--count must be at least 1".into()));
    }
    let core = |e: resurgence::Error| UsageError(e.to_string());
    let prec = ctx.prec;
    let (columns, rows): (&[&str], Vec<Vec<String>>) = match kind {
        ExportKind::Coefficients => {
            let s = series_coefficients(&family.spec, count).map_err(core)?;
            let rows = (0..count)
                .map(|n| {
                    let c = s.c(n);
                    vec![n.to_string(), c.to_string(), s.a(n).to_string(), float_str(&Float::with_val(prec, c))]
                })
                .collect();
            (&["n", "C_n", "a_n", "C_n_float"], rows)
        }
        ExportKind::BorelTaylor => {
            let s = series_coefficients(&family.spec, count).map_err(core)?;
            let g = borel_coefficients(&s, count).map_err(core)?;
            let closed = BorelClosedForm::new(&s);
            let rows = g
                .iter()
                .enumerate()
                .map(|(n, gn)| {
                    vec![
                        n.to_string(),
                        gn.to_string(),
                        float_str(&Float::with_val(prec, gn)),
                        float_str(&closed.taylor_coefficient(n as u32, prec)),
                    ]
                })
                .collect();
            (&["n", "g_n", "g_n_float", "g_n_closed_form"], rows)
        }
        ExportKind::Singularities => {
            let s = series_coefficients(&family.spec, 1).map_err(core)?;
            let sing = singularity_set(&s);
            let rows = sing
                .first(count)
                .into_iter()
                .enumerate()
                .map(|(i, l)| {
                    let r = sing.point_over_pi2(l);
                    let num = if *r.numer() == 1 { "pi^2".to_string() } else { format!("{}*pi^2", r.numer()) };
                    let symbolic = if *r.denom() == 1 { num } else { format!("{num}/{}", r.denom()) };
                    vec![(i + 1).to_string(), l.to_string(), r.to_string(), symbolic, float_str(&sing.point(l, prec))]
                })
                .collect();
            (&["index", "l", "p_over_pi2", "p_symbolic", "p"], rows)
        }
    };
    Ok(Table {
        what: kind.name().into(),
        family: family.label(),
        precision: prec,
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}
