use super::Report;
use crate::error::{input, Error, Result};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => input(format!("report format must be json or csv, got {s:?}")),
        }
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// One row per ladder size; raw values are left to the JSON form.
pub fn to_csv(r: &Report) -> String {
    let mut out = String::from(
        "n,replicates,empirical_mean,empirical_sd,band,within_band,fraction_within_band,min,max,zeros,zero_fraction\n",
    );
    for row in &r.per_n {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.n,
            row.replicates,
            row.empirical_mean,
            row.empirical_sd,
            row.band,
            row.within_band,
            row.fraction_within_band,
            row.min,
            row.max,
            row.zeros,
            row.zero_fraction
        )
        .expect("writing to a string");
    }
    out
}

pub fn emit_report(r: &Report, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Json => serde_json::to_string_pretty(r).map_err(|e| io_error(path, e))? + "\n",
        ReportFormat::Csv => to_csv(r),
    };
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn load_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_error(path, e))
}

/// Whitespace-separated columns for gnuplot: `n mean sd min max prediction`,
/// where the prediction column is `c·n^γ` or `NaN` when absent.
pub fn plot_data(r: &Report) -> String {
    let mut out = format!("# {} ({})\n# n mean sd min max prediction\n", r.provenance.subject, r.statistic);
    for row in &r.per_n {
        let pred = r
            .prediction_check
            .as_ref()
            .map_or(f64::NAN, |c| c.predicted.value_at(row.n as f64));
        writeln!(
            out,
            "{} {} {} {} {} {}",
            row.n, row.empirical_mean, row.empirical_sd, row.min, row.max, pred
        )
        .expect("writing to a string");
    }
    out
}

pub fn emit_plot(r: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, plot_data(r)).map_err(|e| io_error(path, e))
}
