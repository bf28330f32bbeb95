//! CSV row type and the exact output format.
//!
//! The schema is fixed: one header row, then one row per record with real
//! values printed at 17 significant digits (round-trip exact for f64) and a
//! bare `\n` line ending, so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

pub const CSV_HEADER: &str =
    "experiment_id,method,family,n,alpha,delta,seed,metric_name,metric_value,wall_ms";

/// One benchmark trial (or summary) row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment_id: String,
    pub method: String,
    pub family: String,
    /// Sample size for pointwise rows; budget checkpoint for learning rows.
    pub n: u64,
    pub alpha: f64,
    pub delta: f64,
    pub seed: u64,
    pub metric_name: String,
    pub metric_value: f64,
    pub wall_ms: f64,
}

/// 17 significant digits, scientific form; parses back to the same f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl TrialRecord {
    pub fn to_csv_line(&self) -> String {
        let mut line = String::with_capacity(128);
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{},{},{}",
            self.experiment_id,
            self.method,
            self.family,
            self.n,
            fmt_f64(self.alpha),
            fmt_f64(self.delta),
            self.seed,
            self.metric_name,
            fmt_f64(self.metric_value),
            fmt_f64(self.wall_ms),
        );
        line
    }

    pub fn parse(line: &str, line_no: usize) -> Result<Self, CliError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(CliError::runtime(format!(
                "csv line {line_no}: expected 10 fields, found {}",
                fields.len()
            )));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, CliError> {
            s.parse::<f64>().map_err(|_| {
                CliError::runtime(format!("csv line {line_no}: bad {what} value {s:?}"))
            })
        };
        let parse_u = |s: &str, what: &str| -> Result<u64, CliError> {
            s.parse::<u64>().map_err(|_| {
                CliError::runtime(format!("csv line {line_no}: bad {what} value {s:?}"))
            })
        };
        Ok(TrialRecord {
            experiment_id: fields[0].to_string(),
            method: fields[1].to_string(),
            family: fields[2].to_string(),
            n: parse_u(fields[3], "n")?,
            alpha: parse_f(fields[4], "alpha")?,
            delta: parse_f(fields[5], "delta")?,
            seed: parse_u(fields[6], "seed")?,
            metric_name: fields[7].to_string(),
            metric_value: parse_f(fields[8], "metric_value")?,
            wall_ms: parse_f(fields[9], "wall_ms")?,
        })
    }
}

pub fn write_csv(path: &Path, rows: &[TrialRecord]) -> Result<(), CliError> {
    let mut out = String::with_capacity(rows.len() * 128 + 128);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn read_csv(path: &Path) -> Result<Vec<TrialRecord>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != CSV_HEADER {
                return Err(CliError::runtime(format!(
                    "csv line 1: unexpected header {line:?}"
                )));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        rows.push(TrialRecord::parse(line, idx + 1)?);
    }
    Ok(rows)
}
