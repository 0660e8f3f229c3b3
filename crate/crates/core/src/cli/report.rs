use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub error_l2: f64,
    pub error_linf: f64,
    pub bound: Option<f64>,
    pub cond: Option<f64>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows of a convergence sweep, ordered by `N`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("cannot write report: {e}"))
}

/// Writes serializable rows as CSV (header from the field names) or as a JSON array.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(io_err)?;
            writeln!(out).map_err(io_err)
        }
    }
}

impl ConvergenceReport {
    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        if self.rows.is_empty() {
            let mut out = out;
            return match format {
                Format::Csv => writeln!(out, "N,error_l2,error_linf,bound,cond,runtime_ms").map_err(io_err),
                Format::Json => writeln!(out, "[]").map_err(io_err),
            };
        }
        write_rows(&self.rows, format, out)
    }

    /// One line per row for the terminal.
    pub fn summary(&self) -> String {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
        let mut s = String::new();
        for r in &self.rows {
            s += &format!(
                "N={:<4} l2={:.3e} linf={:.3e} bound={} cond={} {:.1} ms\n",
                r.n,
                r.error_l2,
                r.error_linf,
                fmt(r.bound),
                fmt(r.cond),
                r.runtime_ms
            );
        }
        s
    }
}
