//! Maximum-likelihood inference for the Birnbaum-Saunders distribution under
//! type-II right censoring.
//!
//! The crate provides the distribution itself, the censored log-likelihood and
//! score, full and restricted fits, likelihood-ratio and gradient tests on each
//! parameter, and a Monte Carlo engine for size and power studies.

pub mod distribution;
pub mod error;
pub mod estimation;
pub mod inference;
pub mod likelihood;
pub mod normal;
pub mod optimize;
pub mod simulation;

pub use distribution::{BsParams, Moments};
pub use error::{Error, Result};
pub use estimation::{
    bias_corrected_alpha, bias_correction_factor, fit_full, fit_restricted_alpha,
    fit_restricted_beta, initial_values, FitResult,
};
pub use inference::{
    adjusted_gradient_test_alpha, alpha_tests, beta_tests, gradient_test_alpha, gradient_test_beta,
    lr_test_alpha, lr_test_beta, AlphaTests, BetaTests, TestKind, TestOutcome,
};
pub use likelihood::{loglik, score, CensoredSample, Score};
pub use normal::chi2_1_sf as chi2_upper_tail;
pub use simulation::{
    run_power_study, run_size_study, run_study, simulate_statistics, RejectionRate, RejectionTable,
    ReplicationStats, StudyConfig,
};
