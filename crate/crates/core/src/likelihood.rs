//! Type-II right censored log-likelihood and its analytical score.

use serde::{Deserialize, Serialize};

use crate::distribution::{rho, BsParams};
use crate::error::{Error, Result};
use crate::normal;

/// The first `m` ordered failure times out of `n` units on test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSample")]
pub struct CensoredSample {
    observed: Vec<f64>,
    total_units: usize,
}

#[derive(Deserialize)]
struct RawSample {
    observed: Vec<f64>,
    total_units: usize,
}

impl TryFrom<RawSample> for CensoredSample {
    type Error = Error;

    fn try_from(raw: RawSample) -> Result<Self> {
        CensoredSample::new(raw.observed, raw.total_units)
    }
}

impl CensoredSample {
    /// Validates and sorts the observed failure times.
    pub fn new(mut observed: Vec<f64>, total_units: usize) -> Result<Self> {
        if let Some(bad) = observed.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidSample(format!(
                "failure times must be positive and finite, found {bad}"
            )));
        }
        observed.sort_unstable_by(f64::total_cmp);
        Self::from_sorted(observed, total_units)
    }

    /// Complete (uncensored) sample.
    pub fn complete(observed: Vec<f64>) -> Result<Self> {
        let n = observed.len();
        Self::new(observed, n)
    }

    pub(crate) fn from_sorted(observed: Vec<f64>, total_units: usize) -> Result<Self> {
        let m = observed.len();
        if m == 0 {
            return Err(Error::InvalidSample("no observed failures".into()));
        }
        if total_units < m {
            return Err(Error::InvalidSample(format!(
                "total units {total_units} is less than the {m} observed failures"
            )));
        }
        debug_assert!(observed.windows(2).all(|w| w[0] <= w[1]));
        Ok(Self {
            observed,
            total_units,
        })
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    /// `m`
    pub fn failures(&self) -> usize {
        self.observed.len()
    }

    /// `n`
    pub fn total_units(&self) -> usize {
        self.total_units
    }

    pub fn censored(&self) -> usize {
        self.total_units - self.observed.len()
    }

    /// Last observed failure time `t_m`.
    pub fn last(&self) -> f64 {
        self.observed[self.observed.len() - 1]
    }

    /// Every observed time multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(
            self.observed.iter().map(|t| t * k).collect(),
            self.total_units,
        )
    }

    /// Keeps only the first `m` failures, as if the test had stopped earlier.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.failures() {
            return Err(Error::InvalidSample(format!(
                "cannot keep {m} of {} observed failures",
                self.failures()
            )));
        }
        Self::from_sorted(self.observed[..m].to_vec(), self.total_units)
    }
}

/// Gradient of the log-likelihood in `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub alpha: f64,
    pub beta: f64,
}

/// Log-likelihood without the combinatorial constant `ln(n! / (m! (n-m)!))`.
pub fn loglik(p: &BsParams, s: &CensoredSample) -> f64 {
    let (a, b) = (p.alpha(), p.beta());
    let m = s.failures() as f64;
    let mut sum_ln_shift = 0.0;
    let mut sum_ln_t = 0.0;
    let mut sum_rho2 = 0.0;
    for &t in s.observed() {
        sum_ln_shift += (t + b).ln();
        sum_ln_t += t.ln();
        let r = rho(t / b);
        sum_rho2 += r * r;
    }
    // m ln kappa - sum tau/(2a^2) with the exp(1/a^2) factor folded in via tau(z) - 2 = rho(z)^2
    let mut ll = -m * ((2.0 * a).ln() + 0.5 * b.ln() + normal::LN_SQRT_2PI) + sum_ln_shift
        - 1.5 * sum_ln_t
        - sum_rho2 / (2.0 * a * a);
    let censored = s.censored();
    if censored > 0 {
        ll += censored as f64 * normal::log_sf(p.standardize(s.last()));
    }
    ll
}

/// Analytical score `(U_alpha, U_beta)`.
pub fn score(p: &BsParams, s: &CensoredSample) -> Score {
    let (a, b) = (p.alpha(), p.beta());
    let m = s.failures() as f64;
    let mut sum_rho2 = 0.0;
    let mut sum_inv_shift = 0.0;
    let mut sum_diff = 0.0;
    for &t in s.observed() {
        let z = t / b;
        let r = rho(z);
        sum_rho2 += r * r;
        sum_inv_shift += 1.0 / (t + b);
        sum_diff += z - 1.0 / z;
    }
    let a2 = a * a;
    let mut u_alpha = -m / a + sum_rho2 / (a2 * a);
    let mut u_beta = -m / (2.0 * b) + sum_inv_shift + sum_diff / (2.0 * a2 * b);
    let censored = s.censored();
    if censored > 0 {
        let z = s.last() / b;
        let sq = z.sqrt();
        let v = (sq - 1.0 / sq) / a;
        let h_v = normal::hazard(v);
        let w = censored as f64;
        u_alpha += w * v * h_v / a;
        u_beta += w * ((sq + 1.0 / sq) / a) * h_v / (2.0 * b);
    }
    Score {
        alpha: u_alpha,
        beta: u_beta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bs(a: f64, b: f64) -> BsParams {
        BsParams::new(a, b).unwrap()
    }

    #[test]
    fn sample_validation() {
        assert!(CensoredSample::new(vec![], 3).is_err());
        assert!(CensoredSample::new(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(CensoredSample::new(vec![1.0, -2.0], 4).is_err());
        assert!(CensoredSample::new(vec![1.0, f64::NAN], 4).is_err());
        let s = CensoredSample::new(vec![3.0, 1.0, 2.0, 2.0], 6).unwrap();
        assert_eq!(s.observed(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(s.censored(), 2);
        assert_eq!(s.last(), 3.0);
    }

    #[test]
    fn serde_validates_on_read() {
        let bad = r#"{"observed":[1.0,2.0],"total_units":1}"#;
        assert!(serde_json::from_str::<CensoredSample>(bad).is_err());
        let ok = r#"{"observed":[2.0,1.0],"total_units":3}"#;
        let s: CensoredSample = serde_json::from_str(ok).unwrap();
        assert_eq!(s.observed(), &[1.0, 2.0]);
    }

    #[test]
    fn single_observation_reference_value() {
        let s = CensoredSample::complete(vec![1.0]).unwrap();
        assert_relative_eq!(
            loglik(&bs(1.0, 1.0), &s),
            -0.918_938_533_204_672_8,
            max_relative = 1e-14
        );
    }

    #[test]
    fn complete_data_is_sum_of_log_densities() {
        let p = bs(0.6, 2.5);
        let s = CensoredSample::complete(vec![0.7, 1.9, 2.2, 4.4, 9.0]).unwrap();
        let direct: f64 = s.observed().iter().map(|&t| p.ln_pdf(t).unwrap()).sum();
        assert_relative_eq!(loglik(&p, &s), direct, max_relative = 1e-13);
        let sc = score(&p, &s);
        let a = p.alpha();
        let tau_sum: f64 = s.observed().iter().map(|&t| t / 2.5 + 2.5 / t).sum();
        let expected = -(5.0 / a) * (1.0 + 2.0 / (a * a)) + tau_sum / a.powi(3);
        assert_relative_eq!(sc.alpha, expected, max_relative = 1e-12);
    }

    #[test]
    fn rescaling_shifts_loglik_by_m_ln_k() {
        let s = CensoredSample::new(vec![41.0, 44.0, 46.0, 54.0, 55.0, 58.0, 60.0], 10).unwrap();
        let k = 3.7;
        let ks = s.scaled(k).unwrap();
        for &(a, b) in &[(0.2, 50.0), (0.1, 54.0), (1.3, 20.0)] {
            let diff = loglik(&bs(a, k * b), &ks) - loglik(&bs(a, b), &s);
            assert_relative_eq!(diff, -7.0 * k.ln(), max_relative = 1e-10);
        }
    }

    #[test]
    fn loglik_diverges_at_parameter_boundaries() {
        let s = CensoredSample::new(vec![0.8, 0.9, 1.1, 1.4, 2.0], 8).unwrap();
        let centre = loglik(&bs(0.4, 1.2), &s);
        for p in [bs(1e-4, 1.2), bs(1e12, 1.2), bs(0.4, 1e-6), bs(0.4, 1e6)] {
            let l = loglik(&p, &s);
            assert!(l < centre - 50.0 || l == f64::NEG_INFINITY, "{p:?}: {l}");
        }
    }

    #[test]
    fn heavy_censoring_stays_finite() {
        // v_m is in the hundreds; the tail term must not produce -inf or NaN
        let s = CensoredSample::new(vec![1.0, 2.0, 50.0], 40).unwrap();
        let p = bs(0.02, 1.0);
        assert!(loglik(&p, &s).is_finite());
        let sc = score(&p, &s);
        assert!(sc.alpha.is_finite() && sc.beta.is_finite());
    }

    fn fd_gradient(p: &BsParams, s: &CensoredSample) -> (f64, f64) {
        let (a, b) = (p.alpha(), p.beta());
        let ha = 1e-5 * a.max(1.0);
        let hb = 1e-5 * b.max(1.0);
        let da = (loglik(&bs(a + ha, b), s) - loglik(&bs(a - ha, b), s)) / (2.0 * ha);
        let db = (loglik(&bs(a, b + hb), s) - loglik(&bs(a, b - hb), s)) / (2.0 * hb);
        (da, db)
    }

    fn close(x: f64, y: f64, scale: f64) -> bool {
        (x - y).abs() <= 1e-6 * x.abs().max(y.abs()).max(scale)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn score_matches_finite_differences(
            seed in any::<u64>(),
            a_true in 0.1f64..1.5,
            n in 5usize..60,
            frac in 0.3f64..1.0,
            a_off in 0.7f64..1.4,
            b_off in 0.7f64..1.4,
        ) {
            let m = ((n as f64 * frac).round() as usize).clamp(2, n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = bs(a_true, 1.0).sample_type2(n, m, &mut rng).unwrap();
            let p = bs(a_true * a_off, b_off);
            let sc = score(&p, &s);
            let (da, db) = fd_gradient(&p, &s);
            prop_assert!(close(sc.alpha, da, 1.0), "U_alpha {} vs {}", sc.alpha, da);
            prop_assert!(close(sc.beta, db, 1.0), "U_beta {} vs {}", sc.beta, db);
        }

        #[test]
        fn loglik_ignores_input_order(mut times in proptest::collection::vec(0.05f64..20.0, 2..30), extra in 0usize..10) {
            let n = times.len() + extra;
            let p = bs(0.7, 3.0);
            let a = loglik(&p, &CensoredSample::new(times.clone(), n).unwrap());
            times.reverse();
            let b = loglik(&p, &CensoredSample::new(times, n).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}
