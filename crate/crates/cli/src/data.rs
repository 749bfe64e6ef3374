//! Loading lifetime data from plain-text lists or from a saved fit report.

use std::path::Path;

use anyhow::{bail, Context, Result};
use bs_censored::CensoredSample;
use serde::Deserialize;

/// Reads a dataset. A file whose first non-blank character is `{` is taken to
/// be a JSON report written by `bscens fit`, and its embedded sample is reused.
pub fn load(path: &Path, total_units: Option<usize>) -> Result<CensoredSample> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let sample = if text.trim_start().starts_with('{') {
        from_report(&text, total_units)
    } else {
        parse_list(&text, total_units)
    };
    sample.with_context(|| format!("invalid dataset {}", path.display()))
}

#[derive(Deserialize)]
struct SavedReport {
    sample: CensoredSample,
}

fn from_report(text: &str, total_units: Option<usize>) -> Result<CensoredSample> {
    let report: SavedReport = serde_json::from_str(text).context("malformed fit report")?;
    if let Some(n) = total_units {
        if n != report.sample.total_units() {
            bail!(
                "--total-units {n} disagrees with the report, which records {}",
                report.sample.total_units()
            );
        }
    }
    Ok(report.sample)
}

/// One lifetime per line; `#` starts a comment and blank lines are skipped.
pub fn parse_list(text: &str, total_units: Option<usize>) -> Result<CensoredSample> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let v: f64 = line
            .parse()
            .with_context(|| format!("line {lineno}: cannot parse {line:?} as a number"))?;
        if !(v.is_finite() && v > 0.0) {
            bail!("line {lineno}: lifetimes must be positive and finite, got {v}");
        }
        values.push(v);
    }
    if values.len() < 2 {
        bail!("need at least 2 lifetimes, found {}", values.len());
    }
    let n = total_units.unwrap_or(values.len());
    if n < values.len() {
        bail!(
            "--total-units {n} is smaller than the {} observed lifetimes",
            values.len()
        );
    }
    Ok(CensoredSample::new(values, n)?)
}
