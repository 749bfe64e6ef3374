//! Likelihood-ratio, gradient and adjusted gradient tests on `alpha` and `beta`.
//!
//! All statistics are referred to chi-square with one degree of freedom.
//! Gradient statistics are reported with their sign; a negative value is
//! mapped to a p-value of 1 and never leads to rejection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    bias_corrected_alpha, fit_full, fit_restricted_alpha, fit_restricted_beta, FitResult,
};
use crate::likelihood::{score, CensoredSample};
use crate::normal::chi2_1_sf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "LR_alpha")]
    LrAlpha,
    #[serde(rename = "grad_alpha")]
    GradAlpha,
    #[serde(rename = "adj_grad_alpha")]
    AdjGradAlpha,
    #[serde(rename = "LR_beta")]
    LrBeta,
    #[serde(rename = "grad_beta")]
    GradBeta,
}

impl TestKind {
    pub const ALL: [TestKind; 5] = [
        TestKind::LrAlpha,
        TestKind::GradAlpha,
        TestKind::AdjGradAlpha,
        TestKind::LrBeta,
        TestKind::GradBeta,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TestKind::LrAlpha => "LR_alpha",
            TestKind::GradAlpha => "grad_alpha",
            TestKind::AdjGradAlpha => "adj_grad_alpha",
            TestKind::LrBeta => "LR_beta",
            TestKind::GradBeta => "grad_beta",
        }
    }

    pub fn on_alpha(&self) -> bool {
        matches!(
            self,
            TestKind::LrAlpha | TestKind::GradAlpha | TestKind::AdjGradAlpha
        )
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub kind: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub df: u32,
    pub null_value: f64,
}

impl TestOutcome {
    fn new(kind: TestKind, statistic: f64, null_value: f64) -> Result<Self> {
        Ok(Self {
            kind,
            statistic,
            p_value: chi2_1_sf(statistic.max(0.0))?,
            df: 1,
            null_value,
        })
    }

    /// Rejects when the statistic exceeds `critical`.
    pub fn rejects(&self, critical: f64) -> bool {
        self.statistic > critical
    }
}

/// Outcomes of the three tests on `H0: alpha = alpha0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaTests {
    pub lr: TestOutcome,
    pub gradient: TestOutcome,
    /// `None` when the bias correction is undefined for this `(n, m)`.
    pub adjusted: Option<TestOutcome>,
    pub restricted: FitResult,
}

/// Outcomes of the two tests on `H0: beta = beta0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaTests {
    pub lr: TestOutcome,
    pub gradient: TestOutcome,
    pub restricted: FitResult,
}

// Rounding slack for comparing the unrestricted and restricted maxima.
fn loglik_slack(ll: f64) -> f64 {
    1e-9 * (1.0 + ll.abs())
}

/// If a restricted fit beats the unrestricted one, the unrestricted
/// optimizer stopped at a lesser stationary point; restart it from there.
fn ensure_nested(
    s: &CensoredSample,
    full: &FitResult,
    restricted: &FitResult,
) -> Result<FitResult> {
    if restricted.loglik <= full.loglik + loglik_slack(full.loglik) {
        return Ok(*full);
    }
    let refit = fit_full(s, Some(restricted.params))?.require_converged("unrestricted fit")?;
    Ok(if refit.loglik >= full.loglik {
        refit
    } else {
        *full
    })
}

fn lr_statistic(full: &FitResult, restricted: &FitResult) -> f64 {
    let gap = full.loglik - restricted.loglik;
    // differences inside the rounding slack are zero
    if gap.abs() <= loglik_slack(full.loglik) {
        (2.0 * gap).max(0.0)
    } else {
        2.0 * gap
    }
}

/// Runs all `alpha` tests from an existing unrestricted fit.
pub fn alpha_tests(s: &CensoredSample, full: &FitResult, alpha0: f64) -> Result<AlphaTests> {
    let full = full.require_converged("unrestricted fit")?;
    let restricted = fit_restricted_alpha(s, alpha0, Some(full.params.beta()))?
        .require_converged("restricted fit under H0: alpha = alpha0")?;
    let full = ensure_nested(s, &full, &restricted)?;

    let u_alpha = score(&restricted.params, s).alpha;
    let alpha_hat = full.params.alpha();
    let lr = TestOutcome::new(TestKind::LrAlpha, lr_statistic(&full, &restricted), alpha0)?;
    let gradient = TestOutcome::new(TestKind::GradAlpha, u_alpha * (alpha_hat - alpha0), alpha0)?;
    let adjusted = match bias_corrected_alpha(alpha_hat, s.total_units(), s.failures()) {
        Ok(alpha_bar) => Some(TestOutcome::new(
            TestKind::AdjGradAlpha,
            (u_alpha * (alpha_bar - alpha0)).max(0.0),
            alpha0,
        )?),
        Err(Error::DegenerateBiasCorrection { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(AlphaTests {
        lr,
        gradient,
        adjusted,
        restricted,
    })
}

/// Runs both `beta` tests from an existing unrestricted fit.
pub fn beta_tests(s: &CensoredSample, full: &FitResult, beta0: f64) -> Result<BetaTests> {
    let full = full.require_converged("unrestricted fit")?;
    let restricted = fit_restricted_beta(s, beta0, Some(full.params.alpha()))?
        .require_converged("restricted fit under H0: beta = beta0")?;
    let full = ensure_nested(s, &full, &restricted)?;

    let u_beta = score(&restricted.params, s).beta;
    let lr = TestOutcome::new(TestKind::LrBeta, lr_statistic(&full, &restricted), beta0)?;
    let gradient = TestOutcome::new(
        TestKind::GradBeta,
        u_beta * (full.params.beta() - beta0),
        beta0,
    )?;
    Ok(BetaTests {
        lr,
        gradient,
        restricted,
    })
}

fn converged_full(s: &CensoredSample) -> Result<FitResult> {
    fit_full(s, None)?.require_converged("unrestricted fit")
}

/// `2 {l(alpha_hat, beta_hat) - l(alpha0, beta_tilde)}`
pub fn lr_test_alpha(s: &CensoredSample, alpha0: f64) -> Result<TestOutcome> {
    Ok(alpha_tests(s, &converged_full(s)?, alpha0)?.lr)
}

/// `2 {l(alpha_hat, beta_hat) - l(alpha_tilde, beta0)}`
pub fn lr_test_beta(s: &CensoredSample, beta0: f64) -> Result<TestOutcome> {
    Ok(beta_tests(s, &converged_full(s)?, beta0)?.lr)
}

/// `U_alpha(alpha0, beta_tilde) (alpha_hat - alpha0)`
pub fn gradient_test_alpha(s: &CensoredSample, alpha0: f64) -> Result<TestOutcome> {
    Ok(alpha_tests(s, &converged_full(s)?, alpha0)?.gradient)
}

/// `U_beta(alpha_tilde, beta0) (beta_hat - beta0)`
pub fn gradient_test_beta(s: &CensoredSample, beta0: f64) -> Result<TestOutcome> {
    Ok(beta_tests(s, &converged_full(s)?, beta0)?.gradient)
}

/// `max{0, U_alpha(alpha0, beta_tilde) (alpha_bar - alpha0)}` with the
/// bias-corrected shape estimate `alpha_bar`.
///
/// Fails with [`Error::DegenerateBiasCorrection`] when `alpha_bar` is undefined.
pub fn adjusted_gradient_test_alpha(s: &CensoredSample, alpha0: f64) -> Result<TestOutcome> {
    let full = converged_full(s)?;
    bias_corrected_alpha(full.params.alpha(), s.total_units(), s.failures())?;
    let tests = alpha_tests(s, &full, alpha0)?;
    Ok(tests.adjusted.expect("bias correction checked above"))
}
