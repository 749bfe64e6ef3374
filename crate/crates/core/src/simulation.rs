//! Monte Carlo estimation of null (size) and nonnull (power) rejection rates.
//!
//! Replication `r` draws from its own ChaCha stream `(seed, r)`, so results
//! do not depend on how replications are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::BsParams;
use crate::error::{Error, Result};
use crate::estimation::fit_full;
use crate::inference::{alpha_tests, beta_tests, TestKind};
use crate::normal::chi2_1_critical;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub n: usize,
    /// Degree of censoring, `1 - m/n`.
    pub censoring_fraction: f64,
    pub true_alpha: f64,
    pub true_beta: f64,
    /// Null value for the tests on `alpha`; `None` skips them.
    pub null_alpha: Option<f64>,
    /// Null value for the tests on `beta`; `None` skips them.
    pub null_beta: Option<f64>,
    pub nominal_levels: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
}

impl StudyConfig {
    /// Size study: both hypotheses tested at the true parameter values.
    pub fn size(
        n: usize,
        censoring_fraction: f64,
        alpha: f64,
        beta: f64,
        nominal_levels: Vec<f64>,
        replications: usize,
        seed: u64,
    ) -> Self {
        Self {
            n,
            censoring_fraction,
            true_alpha: alpha,
            true_beta: beta,
            null_alpha: Some(alpha),
            null_beta: Some(beta),
            nominal_levels,
            replications,
            seed,
        }
    }

    /// Observed failures per replication, `round(n (1 - doc))`.
    pub fn failures(&self) -> usize {
        (self.n as f64 * (1.0 - self.censoring_fraction)).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(0.0..1.0).contains(&self.censoring_fraction) {
            return bad(format!(
                "degree of censoring must lie in [0, 1), got {}",
                self.censoring_fraction
            ));
        }
        let m = self.failures();
        if m < 2 {
            return bad(format!(
                "n = {} with censoring {} leaves m = {m} failures; at least 2 are needed",
                self.n, self.censoring_fraction
            ));
        }
        BsParams::new(self.true_alpha, self.true_beta)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        for (name, v) in [
            ("null alpha", self.null_alpha),
            ("null beta", self.null_beta),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if self.null_alpha.is_none() && self.null_beta.is_none() {
            return bad("no hypothesis to test: set a null value for alpha or beta".into());
        }
        if self.nominal_levels.is_empty() {
            return bad("at least one nominal level is required".into());
        }
        if let Some(l) = self
            .nominal_levels
            .iter()
            .find(|l| !(**l > 0.0 && **l < 1.0))
        {
            return bad(format!("nominal levels must lie in (0, 1), got {l}"));
        }
        if self.replications < 1 {
            return bad("replications must be at least 1".into());
        }
        Ok(())
    }
}

/// Statistics of one replication, indexed by [`TestKind`]; `None` where a
/// test was not requested or the adjusted statistic is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ReplicationStats {
    values: [Option<f64>; 5],
    pub adjusted_clamped: bool,
}

fn slot(kind: TestKind) -> usize {
    match kind {
        TestKind::LrAlpha => 0,
        TestKind::GradAlpha => 1,
        TestKind::AdjGradAlpha => 2,
        TestKind::LrBeta => 3,
        TestKind::GradBeta => 4,
    }
}

impl ReplicationStats {
    pub fn get(&self, kind: TestKind) -> Option<f64> {
        self.values[slot(kind)]
    }

    fn set(&mut self, kind: TestKind, v: f64) {
        self.values[slot(kind)] = Some(v);
    }
}

/// Random stream for replication `index`.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates one replication. `None` means a required fit failed.
pub fn replicate(c: &StudyConfig, index: u64) -> Option<ReplicationStats> {
    let truth = BsParams::new(c.true_alpha, c.true_beta).ok()?;
    let mut rng = replication_rng(c.seed, index);
    let sample = truth.sample_type2(c.n, c.failures(), &mut rng).ok()?;
    let full = fit_full(&sample, None).ok()?;
    if !full.converged {
        return None;
    }
    let mut out = ReplicationStats::default();
    if let Some(a0) = c.null_alpha {
        let t = alpha_tests(&sample, &full, a0).ok()?;
        out.set(TestKind::LrAlpha, t.lr.statistic);
        out.set(TestKind::GradAlpha, t.gradient.statistic);
        if let Some(adj) = t.adjusted {
            out.set(TestKind::AdjGradAlpha, adj.statistic);
            out.adjusted_clamped = adj.statistic == 0.0;
        }
    }
    if let Some(b0) = c.null_beta {
        let t = beta_tests(&sample, &full, b0).ok()?;
        out.set(TestKind::LrBeta, t.lr.statistic);
        out.set(TestKind::GradBeta, t.gradient.statistic);
    }
    Some(out)
}

/// All replications in index order.
pub fn simulate_statistics(
    c: &StudyConfig,
    workers: Option<usize>,
) -> Result<Vec<Option<ReplicationStats>>> {
    c.validate()?;
    let run = || {
        (0..c.replications as u64)
            .into_par_iter()
            .map(|r| replicate(c, r))
            .collect::<Vec<_>>()
    };
    match workers {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start {k} workers: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionRate {
    pub kind: TestKind,
    pub level: f64,
    pub critical_value: f64,
    pub null_value: f64,
    pub rejections: usize,
    pub valid: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionTable {
    pub config: StudyConfig,
    pub failures: usize,
    pub replications: usize,
    pub valid: usize,
    /// Replications dropped because a required fit failed.
    pub excluded: usize,
    /// Valid replications without an adjusted statistic.
    pub adjusted_unavailable: usize,
    /// Valid replications where the adjusted statistic was clamped to zero.
    pub adjusted_clamped: usize,
    pub rates: Vec<RejectionRate>,
}

impl RejectionTable {
    pub fn rate(&self, kind: TestKind, level: f64) -> Option<f64> {
        self.rates
            .iter()
            .find(|r| r.kind == kind && r.level == level)
            .map(|r| r.rate)
    }

    fn tabulate(config: &StudyConfig, reps: &[Option<ReplicationStats>]) -> Result<Self> {
        let valid_reps: Vec<&ReplicationStats> = reps.iter().flatten().collect();
        let valid = valid_reps.len();
        let mut rates = Vec::new();
        for kind in TestKind::ALL {
            let null_value = if kind.on_alpha() {
                config.null_alpha
            } else {
                config.null_beta
            };
            let Some(null_value) = null_value else {
                continue;
            };
            let values: Vec<f64> = valid_reps.iter().filter_map(|r| r.get(kind)).collect();
            if values.is_empty() && kind == TestKind::AdjGradAlpha {
                continue;
            }
            for &level in &config.nominal_levels {
                let critical_value = chi2_1_critical(level)?;
                let rejections = values.iter().filter(|&&v| v > critical_value).count();
                rates.push(RejectionRate {
                    kind,
                    level,
                    critical_value,
                    null_value,
                    rejections,
                    valid: values.len(),
                    rate: if values.is_empty() {
                        f64::NAN
                    } else {
                        rejections as f64 / values.len() as f64
                    },
                });
            }
        }
        let alpha_tested = config.null_alpha.is_some();
        Ok(Self {
            config: config.clone(),
            failures: config.failures(),
            replications: reps.len(),
            valid,
            excluded: reps.len() - valid,
            adjusted_unavailable: if alpha_tested {
                valid_reps
                    .iter()
                    .filter(|r| r.get(TestKind::AdjGradAlpha).is_none())
                    .count()
            } else {
                0
            },
            adjusted_clamped: valid_reps.iter().filter(|r| r.adjusted_clamped).count(),
            rates,
        })
    }
}

/// Runs a study and tabulates rejection rates at every nominal level.
pub fn run_study(c: &StudyConfig, workers: Option<usize>) -> Result<RejectionTable> {
    let reps = simulate_statistics(c, workers)?;
    RejectionTable::tabulate(c, &reps)
}

/// Null rejection rates: every requested null must equal the true value.
pub fn run_size_study(c: &StudyConfig, workers: Option<usize>) -> Result<RejectionTable> {
    if c.null_alpha.is_some_and(|a| a != c.true_alpha)
        || c.null_beta.is_some_and(|b| b != c.true_beta)
    {
        return Err(Error::InvalidConfig(
            "a size study tests the true parameter values; use a power study for other nulls"
                .into(),
        ));
    }
    run_study(c, workers)
}

/// Nonnull rejection rates: data drawn at the true values, tested at the nulls.
pub fn run_power_study(c: &StudyConfig, workers: Option<usize>) -> Result<RejectionTable> {
    run_study(c, workers)
}
