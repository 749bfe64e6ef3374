//! Report types and their CSV, JSON and text renderings.
//!
//! JSON carries full precision; text and CSV print four decimals.

use std::fmt::Write as _;

use anyhow::Result;
use bs_censored::{
    alpha_tests, beta_tests, bias_correction_factor, CensoredSample, FitResult, RejectionTable,
    TestOutcome,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub sample: CensoredSample,
    pub n: usize,
    pub m: usize,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    /// `None` when the correction factor is undefined for this design.
    pub alpha_bias_corrected: Option<f64>,
    pub bias_correction_factor: Option<f64>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
}

impl FitReport {
    pub fn new(sample: &CensoredSample, fit: &FitResult) -> Self {
        let (n, m) = (sample.total_units(), sample.failures());
        let factor = bias_correction_factor(n, m).ok();
        Self {
            sample: sample.clone(),
            n,
            m,
            alpha_hat: fit.params.alpha(),
            beta_hat: fit.params.beta(),
            alpha_bias_corrected: factor.map(|k| k * fit.params.alpha()),
            bias_correction_factor: factor,
            loglik: fit.loglik,
            converged: fit.converged,
            iterations: fit.iterations,
            grad_norm: fit.grad_norm,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record([
                    "n",
                    "m",
                    "alpha_hat",
                    "beta_hat",
                    "alpha_bc",
                    "loglik",
                    "converged",
                    "iterations",
                ])?;
                w.write_record([
                    self.n.to_string(),
                    self.m.to_string(),
                    f4(self.alpha_hat),
                    f4(self.beta_hat),
                    self.alpha_bias_corrected.map(f4).unwrap_or_default(),
                    f4(self.loglik),
                    self.converged.to_string(),
                    self.iterations.to_string(),
                ])?;
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Text => {
                let mut s = String::new();
                writeln!(s, "observed       {} of {} units", self.m, self.n)?;
                writeln!(s, "alpha_hat      {}", f4(self.alpha_hat))?;
                writeln!(s, "beta_hat       {}", f4(self.beta_hat))?;
                match self.alpha_bias_corrected {
                    Some(a) => writeln!(s, "alpha_bc       {}", f4(a))?,
                    None => writeln!(s, "alpha_bc       unavailable")?,
                }
                writeln!(s, "loglik         {}", f4(self.loglik))?;
                writeln!(
                    s,
                    "converged      {} ({} iterations, gradient norm {:.1e})",
                    if self.converged { "yes" } else { "no" },
                    self.iterations,
                    self.grad_norm
                )?;
                Ok(s)
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AlphaSection {
    pub null_value: f64,
    pub restricted_beta: f64,
    pub lr: TestOutcome,
    pub gradient: TestOutcome,
    pub adjusted: Option<TestOutcome>,
    /// Set when `adjusted` is `None`.
    pub adjusted_unavailable: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct BetaSection {
    pub null_value: f64,
    pub restricted_alpha: f64,
    pub lr: TestOutcome,
    pub gradient: TestOutcome,
}

#[derive(Debug, Serialize)]
pub struct TestReport {
    pub fit: FitReport,
    pub alpha: Option<AlphaSection>,
    pub beta: Option<BetaSection>,
}

impl TestReport {
    pub fn new(
        sample: &CensoredSample,
        fit: &FitResult,
        null_alpha: Option<f64>,
        null_beta: Option<f64>,
    ) -> Result<Self> {
        let alpha = match null_alpha {
            Some(a0) => {
                let t = alpha_tests(sample, fit, a0)?;
                let adjusted_unavailable = match t.adjusted {
                    Some(_) => None,
                    None => bias_correction_factor(sample.total_units(), sample.failures())
                        .err()
                        .map(|e| e.to_string()),
                };
                Some(AlphaSection {
                    null_value: a0,
                    restricted_beta: t.restricted.params.beta(),
                    lr: t.lr,
                    gradient: t.gradient,
                    adjusted: t.adjusted,
                    adjusted_unavailable,
                })
            }
            None => None,
        };
        let beta = match null_beta {
            Some(b0) => {
                let t = beta_tests(sample, fit, b0)?;
                Some(BetaSection {
                    null_value: b0,
                    restricted_alpha: t.restricted.params.alpha(),
                    lr: t.lr,
                    gradient: t.gradient,
                })
            }
            None => None,
        };
        Ok(Self {
            fit: FitReport::new(sample, fit),
            alpha,
            beta,
        })
    }

    fn rows(&self) -> Vec<(&'static str, f64, Option<&TestOutcome>)> {
        let mut rows = Vec::new();
        if let Some(a) = &self.alpha {
            rows.push(("LR(alpha)", a.null_value, Some(&a.lr)));
            rows.push(("S_T(alpha)", a.null_value, Some(&a.gradient)));
            rows.push(("S_T(alpha)*", a.null_value, a.adjusted.as_ref()));
        }
        if let Some(b) = &self.beta {
            rows.push(("LR(beta)", b.null_value, Some(&b.lr)));
            rows.push(("S_T(beta)", b.null_value, Some(&b.gradient)));
        }
        rows
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["test", "null_value", "statistic", "p_value"])?;
                for (name, null, t) in self.rows() {
                    let (stat, p) = t.map_or((String::new(), String::new()), |t| {
                        (f4(t.statistic), f4(t.p_value))
                    });
                    w.write_record([name.to_string(), null.to_string(), stat, p])?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Text => {
                let mut s = self.fit.render(Format::Text)?;
                writeln!(s)?;
                writeln!(
                    s,
                    "{:<12} {:>10} {:>10} {:>8}",
                    "test", "null", "statistic", "p-value"
                )?;
                for (name, null, t) in self.rows() {
                    match t {
                        Some(t) => writeln!(
                            s,
                            "{name:<12} {null:>10} {:>10} {:>8}",
                            f4(t.statistic),
                            f4(t.p_value)
                        )?,
                        None => {
                            let why = self
                                .alpha
                                .as_ref()
                                .and_then(|a| a.adjusted_unavailable.as_deref())
                                .unwrap_or("not computed");
                            writeln!(s, "{name:<12} {null:>10} unavailable: {why}")?
                        }
                    }
                }
                Ok(s)
            }
        }
    }
}

pub fn table_csv(t: &RejectionTable) -> Result<String> {
    let c = &t.config;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "test",
        "level",
        "critical_value",
        "null_value",
        "n",
        "m",
        "doc",
        "true_alpha",
        "true_beta",
        "replications",
        "seed",
        "valid",
        "excluded",
        "rejections",
        "rate",
    ])?;
    for r in &t.rates {
        w.write_record([
            r.kind.as_str().to_string(),
            r.level.to_string(),
            r.critical_value.to_string(),
            r.null_value.to_string(),
            c.n.to_string(),
            t.failures.to_string(),
            c.censoring_fraction.to_string(),
            c.true_alpha.to_string(),
            c.true_beta.to_string(),
            t.replications.to_string(),
            c.seed.to_string(),
            r.valid.to_string(),
            t.excluded.to_string(),
            r.rejections.to_string(),
            r.rate.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn table_text(t: &RejectionTable) -> Result<String> {
    let c = &t.config;
    let mut s = String::new();
    writeln!(
        s,
        "n = {}, m = {}, doc = {}, alpha = {}, beta = {}, seed = {}",
        c.n, t.failures, c.censoring_fraction, c.true_alpha, c.true_beta, c.seed
    )?;
    writeln!(
        s,
        "replications {} (valid {}, excluded {})",
        t.replications, t.valid, t.excluded
    )?;
    if t.adjusted_unavailable > 0 {
        writeln!(
            s,
            "adjusted statistic unavailable in {} replications",
            t.adjusted_unavailable
        )?;
    }
    writeln!(s)?;
    writeln!(
        s,
        "{:<16} {:>8} {:>8} {:>10}",
        "test", "null", "level", "rate (%)"
    )?;
    for r in &t.rates {
        writeln!(
            s,
            "{:<16} {:>8} {:>8} {:>10}",
            r.kind.as_str(),
            r.null_value,
            r.level,
            format!("{:.2}", 100.0 * r.rate)
        )?;
    }
    Ok(s)
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}
