//! Full and restricted maximum-likelihood fits.
//!
//! All fits work on `(ln alpha, ln beta)` so positivity never has to be
//! enforced explicitly. The convergence measure is the max-norm of the
//! log-likelihood gradient in those coordinates, `(alpha U_alpha, beta U_beta)`,
//! which is invariant under rescaling of the data.

use serde::Serialize;

use crate::distribution::{rho, BsParams};
use crate::error::{Error, Result};
use crate::likelihood::{loglik, score, CensoredSample};
use crate::optimize::{bfgs_minimize, find_decreasing_root, BfgsOptions};

/// Convergence threshold on the log-coordinate gradient.
pub const GRAD_TOL: f64 = 1e-8;
/// The optimizers aim this far below [`GRAD_TOL`], so the raw score also
/// meets it for parameters down to about 0.01.
const TARGET_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 200;
const RESTART_FACTOR: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub params: BsParams,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Max-norm of the free gradient components in log coordinates.
    pub grad_norm: f64,
}

impl FitResult {
    /// The fit, or [`Error::NotConverged`] when it did not converge.
    pub fn require_converged(self, what: &'static str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                what,
                iterations: self.iterations,
                grad_norm: self.grad_norm,
            })
        }
    }
}

/// Deterministic starting point: median (or last failure under heavy
/// censoring) for beta, root-mean-square of `rho(t / beta0)` for alpha.
pub fn initial_values(s: &CensoredSample) -> BsParams {
    let t = s.observed();
    let m = t.len();
    let beta0 = if 2 * m > s.total_units() {
        if m % 2 == 1 {
            t[m / 2]
        } else {
            0.5 * (t[m / 2 - 1] + t[m / 2])
        }
    } else {
        s.last()
    };
    let ms = t.iter().map(|&x| rho(x / beta0).powi(2)).sum::<f64>() / m as f64;
    let alpha0 = ms.sqrt().clamp(0.05, 3.0);
    BsParams::new(alpha0, beta0).expect("observed times are positive")
}

fn params_from_log(x: &[f64; 2]) -> Option<BsParams> {
    BsParams::new(x[0].exp(), x[1].exp()).ok()
}

fn full_attempt(s: &CensoredSample, start: BsParams) -> Option<FitResult> {
    let opts = BfgsOptions {
        grad_tol: TARGET_TOL,
        max_iter: MAX_ITER,
        ..Default::default()
    };
    let neg = |x: &[f64; 2]| {
        let p = params_from_log(x)?;
        let l = loglik(&p, s);
        let u = score(&p, s);
        let g = [-p.alpha() * u.alpha, -p.beta() * u.beta];
        (l.is_finite() && g.iter().all(|v| v.is_finite())).then_some((-l, g))
    };
    let x0 = [start.alpha().ln(), start.beta().ln()];
    let min = bfgs_minimize(neg, x0, &opts)?;
    let grad_norm = min.grad[0].abs().max(min.grad[1].abs());
    Some(FitResult {
        params: params_from_log(&min.x)?,
        loglik: -min.value,
        converged: grad_norm <= GRAD_TOL,
        iterations: min.iterations,
        grad_norm,
    })
}

/// Unrestricted MLE of `(alpha, beta)`.
///
/// Needs at least two observed failures. A failed run is retried once from
/// the default starting point scaled by 1.2; if that fails too the returned
/// result has `converged == false`.
pub fn fit_full(s: &CensoredSample, init: Option<BsParams>) -> Result<FitResult> {
    if s.failures() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: s.failures(),
        });
    }
    let default_start = initial_values(s);
    let first = full_attempt(s, init.unwrap_or(default_start));
    if let Some(fit) = first.filter(|f| f.converged) {
        return Ok(fit);
    }
    let perturbed = BsParams::new(
        default_start.alpha() * RESTART_FACTOR,
        default_start.beta() * RESTART_FACTOR,
    )?;
    let second = full_attempt(s, perturbed);
    match (first, second) {
        (_, Some(fit)) if fit.converged => Ok(fit),
        (Some(a), Some(b)) => Ok(if a.grad_norm <= b.grad_norm { a } else { b }),
        (Some(f), None) | (None, Some(f)) => Ok(f),
        (None, None) => Ok(FitResult {
            params: default_start,
            loglik: loglik(&default_start, s),
            converged: false,
            iterations: 0,
            grad_norm: f64::INFINITY,
        }),
    }
}

#[derive(Clone, Copy)]
enum Free {
    Alpha,
    Beta,
}

fn restricted_attempt(s: &CensoredSample, fixed: f64, free: Free, start: f64) -> Option<FitResult> {
    let build = |x: f64| match free {
        Free::Alpha => BsParams::new(x.exp(), fixed).ok(),
        Free::Beta => BsParams::new(fixed, x.exp()).ok(),
    };
    let deriv = |x: f64| {
        let p = build(x)?;
        let u = score(&p, s);
        Some(match free {
            Free::Alpha => p.alpha() * u.alpha,
            Free::Beta => p.beta() * u.beta,
        })
    };
    let root = find_decreasing_root(deriv, start.ln(), TARGET_TOL, MAX_ITER)?;
    let params = build(root.x)?;
    let ll = loglik(&params, s);
    Some(FitResult {
        params,
        loglik: ll,
        converged: root.derivative.abs() <= GRAD_TOL && ll.is_finite(),
        iterations: root.iterations,
        grad_norm: root.derivative.abs(),
    })
}

fn restricted(s: &CensoredSample, fixed: f64, free: Free, init: Option<f64>) -> Result<FitResult> {
    let default_start = initial_values(s);
    let pick = |p: &BsParams| match free {
        Free::Alpha => p.alpha(),
        Free::Beta => p.beta(),
    };
    let start = init.unwrap_or_else(|| pick(&default_start));
    if !(start > 0.0 && start.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "initial value",
            value: start,
        });
    }
    let first = restricted_attempt(s, fixed, free, start);
    if let Some(fit) = first.filter(|f| f.converged) {
        return Ok(fit);
    }
    let second = restricted_attempt(s, fixed, free, pick(&default_start) * RESTART_FACTOR);
    match second.or(first) {
        Some(fit) => Ok(fit),
        None => {
            let params = match free {
                Free::Alpha => BsParams::new(pick(&default_start), fixed)?,
                Free::Beta => BsParams::new(fixed, pick(&default_start))?,
            };
            Ok(FitResult {
                params,
                loglik: loglik(&params, s),
                converged: false,
                iterations: 0,
                grad_norm: f64::INFINITY,
            })
        }
    }
}

/// Maximizes over `beta` with `alpha = alpha0` held fixed.
pub fn fit_restricted_alpha(
    s: &CensoredSample,
    alpha0: f64,
    init_beta: Option<f64>,
) -> Result<FitResult> {
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "alpha0",
            value: alpha0,
        });
    }
    restricted(s, alpha0, Free::Beta, init_beta)
}

/// Maximizes over `alpha` with `beta = beta0` held fixed.
pub fn fit_restricted_beta(
    s: &CensoredSample,
    beta0: f64,
    init_alpha: Option<f64>,
) -> Result<FitResult> {
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "beta0",
            value: beta0,
        });
    }
    restricted(s, beta0, Free::Alpha, init_alpha)
}

/// Multiplier `{1 - [1 + 2.5 (1 - m/n)] / n}^-1` applied to the shape MLE.
pub fn bias_correction_factor(n: usize, m: usize) -> Result<f64> {
    if m < 1 || m > n {
        return Err(Error::InvalidSample(format!(
            "need 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let nf = n as f64;
    let denom = 1.0 - (1.0 + 2.5 * (1.0 - m as f64 / nf)) / nf;
    if denom <= 0.0 {
        return Err(Error::DegenerateBiasCorrection {
            n,
            m,
            factor: denom,
        });
    }
    Ok(1.0 / denom)
}

/// Bias-corrected shape estimate for a type-II censored sample of `m` out of `n`.
pub fn bias_corrected_alpha(alpha_hat: f64, n: usize, m: usize) -> Result<f64> {
    if !(alpha_hat > 0.0 && alpha_hat.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "alpha_hat",
            value: alpha_hat,
        });
    }
    Ok(alpha_hat * bias_correction_factor(n, m)?)
}
