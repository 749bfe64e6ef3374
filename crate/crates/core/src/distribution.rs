//! The two-parameter Birnbaum-Saunders (fatigue-life) distribution.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::CensoredSample;
use crate::normal;

/// Shape `alpha` and scale `beta` of a Birnbaum-Saunders law. `beta` is the median.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsParams {
    alpha: f64,
    beta: f64,
}

/// Closed-form summary moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// `sqrt(z) - 1/sqrt(z)`
#[inline]
pub(crate) fn rho(z: f64) -> f64 {
    let s = z.sqrt();
    s - 1.0 / s
}

/// Maps a standard normal variate to a BS(alpha, 1) variate:
/// `(a z/2 + sqrt((a z/2)^2 + 1))^2`, rewritten for negative `z` so the
/// bracket never cancels.
#[inline]
fn standard_normal_to_unit(alpha: f64, z: f64) -> f64 {
    let w = 0.5 * alpha * z;
    let root = w.hypot(1.0);
    let core = if w >= 0.0 { w + root } else { 1.0 / (root - w) };
    core * core
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "lifetime",
            value: t,
        })
    }
}

impl BsParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
            });
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
            });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Standardized abscissa `v = rho(t / beta) / alpha`, so that `F(t) = Phi(v)`.
    pub fn standardize(&self, t: f64) -> f64 {
        rho(t / self.beta) / self.alpha
    }

    pub fn ln_pdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let (a, b) = (self.alpha, self.beta);
        // kappa * exp(-tau/(2a^2)) folded into exp(-rho^2/(2a^2)), since tau(z) - 2 = rho(z)^2
        let r = rho(t / b);
        Ok(
            -(2.0 * a).ln() - 0.5 * b.ln() - normal::LN_SQRT_2PI - 1.5 * t.ln() + (t + b).ln()
                - r * r / (2.0 * a * a),
        )
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        Ok(self.ln_pdf(t)?.exp())
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(normal::cdf(self.standardize(t)))
    }

    /// Survival function `1 - F(t)`.
    pub fn sf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(normal::sf(self.standardize(t)))
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::OutOfDomain {
                what: "probability",
                value: u,
            });
        }
        let z = normal::quantile(u)?;
        Ok(self.beta * standard_normal_to_unit(self.alpha, z))
    }

    /// Inverse of the survival function: the `t` with `1 - F(t) = q`.
    ///
    /// Far in the upper tail `1 - u` carries only a few significant bits, so
    /// `quantile(1 - q)` loses accuracy there; this form does not.
    pub fn quantile_upper(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::OutOfDomain {
                what: "survival probability",
                value: q,
            });
        }
        let z = -normal::quantile(q)?;
        Ok(self.beta * standard_normal_to_unit(self.alpha, z))
    }

    /// Hazard `f(t) / (1 - F(t))`, evaluated in log space.
    pub fn hazard(&self, t: f64) -> Result<f64> {
        let ln_f = self.ln_pdf(t)?;
        Ok((ln_f - normal::log_sf(self.standardize(t))).exp())
    }

    pub fn moments(&self) -> Moments {
        let a2 = self.alpha * self.alpha;
        let b = self.beta;
        let denom = 5.0 * a2 + 4.0;
        Moments {
            mean: b * (1.0 + 0.5 * a2),
            variance: a2 * b * b * (1.0 + 1.25 * a2),
            skewness: 4.0 * self.alpha * (11.0 * a2 + 6.0) / denom.powf(1.5),
            kurtosis: 3.0 + 6.0 * a2 * (93.0 * a2 + 40.0) / (denom * denom),
        }
    }

    /// `E(T^order)` from the Bessel-K ratio. Half-integer orders reduce
    /// to finite sums in which the common `sqrt(pi/2x) e^-x` factor cancels.
    pub fn raw_moment(&self, order: i32) -> Result<f64> {
        if order < 1 {
            return Err(Error::OutOfDomain {
                what: "moment order",
                value: order as f64,
            });
        }
        let x = 1.0 / (self.alpha * self.alpha);
        let p = order as usize;
        let upper = half_integer_bessel_k_sum(p, x);
        let lower = half_integer_bessel_k_sum(p - 1, x);
        Ok(self.beta.powi(order) * (upper + lower) / 2.0)
    }

    /// Draws `count` i.i.d. lifetimes by transforming standard normal draws.
    pub fn sample_complete<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                self.beta * standard_normal_to_unit(self.alpha, z)
            })
            .collect()
    }

    /// Puts `n` units on test and keeps the first `m` ordered failures.
    pub fn sample_type2<R: Rng + ?Sized>(
        &self,
        n: usize,
        m: usize,
        rng: &mut R,
    ) -> Result<CensoredSample> {
        if m < 1 || m > n {
            return Err(Error::InvalidSample(format!(
                "need 1 <= m <= n, got m = {m}, n = {n}"
            )));
        }
        let mut all = self.sample_complete(n, rng);
        all.sort_unstable_by(f64::total_cmp);
        all.truncate(m);
        CensoredSample::from_sorted(all, n)
    }

    /// Parameters of `1/T` when `T` follows `self`.
    pub fn reciprocal(&self) -> Self {
        Self {
            alpha: self.alpha,
            beta: 1.0 / self.beta,
        }
    }
}

/// `K_{n+1/2}(x) / (sqrt(pi/(2x)) e^{-x}) = sum_{k=0}^{n} (n+k)! / (k! (n-k)! (2x)^k)`.
fn half_integer_bessel_k_sum(n: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=n {
        // ratio of consecutive terms: (n+k)(n-k+1) / (k 2x)
        term *= ((n + k) * (n - k + 1)) as f64 / (k as f64 * 2.0 * x);
        sum += term;
    }
    sum
}
