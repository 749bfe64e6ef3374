//! Fits and test statistics checked against derivative-free oracles that
//! share nothing with the quasi-Newton and Brent code paths.

use bs_censored::{
    alpha_tests, beta_tests, fit_full, fit_restricted_alpha, fit_restricted_beta, loglik, score,
    BsParams, CensoredSample,
};

const MICE: [f64; 7] = [41.0, 44.0, 46.0, 54.0, 55.0, 58.0, 60.0];

fn mice(n: usize) -> CensoredSample {
    CensoredSample::new(MICE.to_vec(), n).unwrap()
}

fn ll(s: &CensoredSample, a: f64, b: f64) -> f64 {
    loglik(&BsParams::new(a, b).unwrap(), s)
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-13 * (lo.abs() + hi.abs()) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Root of a decreasing function on `[lo, hi]` by bisection.
fn bisect_decreasing(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(g(lo) > 0.0 && g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid search over `[0.01, 2] x [30, 80]`, refined by alternating bisection
/// on the two score equations.
fn grid_oracle(s: &CensoredSample) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=400 {
        let a = 0.01 + (2.0 - 0.01) * i as f64 / 400.0;
        for j in 0..=400 {
            let b = 30.0 + 50.0 * j as f64 / 400.0;
            let l = ll(s, a, b);
            if l > best.0 {
                best = (l, a, b);
            }
        }
    }
    let (mut a, mut b) = (best.1, best.2);
    for _ in 0..200 {
        let ua = |x: f64| score(&BsParams::new(x, b).unwrap(), s).alpha;
        a = bisect_decreasing(ua, a * 0.5, a * 2.0);
        let ub = |y: f64| score(&BsParams::new(a, y).unwrap(), s).beta;
        b = bisect_decreasing(ub, b * 0.5, b * 2.0);
    }
    (a, b)
}

#[test]
fn mice_full_fit_matches_grid_oracle() {
    for n in [7, 10] {
        let s = mice(n);
        let fit = fit_full(&s, None).unwrap();
        assert!(fit.converged);
        let (a, b) = grid_oracle(&s);
        assert!(
            (fit.params.alpha() / a - 1.0).abs() < 1e-4,
            "n={n}: {} vs {a}",
            fit.params.alpha()
        );
        assert!(
            (fit.params.beta() / b - 1.0).abs() < 1e-4,
            "n={n}: {} vs {b}",
            fit.params.beta()
        );
    }
}

#[test]
fn mice_censored_fit_reference_values() {
    // frozen from an independent Nelder-Mead fit of the same log-likelihood
    let fit = fit_full(&mice(10), None).unwrap();
    assert!((fit.params.alpha() - 0.183_307_35).abs() < 1e-6);
    assert!((fit.params.beta() - 55.251_187).abs() < 1e-4);
}

#[test]
fn restricted_fits_match_golden_section() {
    let s = mice(10);
    for alpha0 in [0.1, 0.18, 0.4] {
        let fit = fit_restricted_alpha(&s, alpha0, None).unwrap();
        let b = golden_max(|b| ll(&s, alpha0, b), 20.0, 120.0);
        assert!(
            (fit.params.beta() / b - 1.0).abs() < 1e-6,
            "alpha0={alpha0}"
        );
    }
    for beta0 in [45.0, 54.0, 70.0] {
        let fit = fit_restricted_beta(&s, beta0, None).unwrap();
        let a = golden_max(|a| ll(&s, a, beta0), 0.01, 2.0);
        assert!((fit.params.alpha() / a - 1.0).abs() < 1e-6, "beta0={beta0}");
    }
}

#[test]
fn statistics_match_oracle_recomputation() {
    let s = mice(10);
    let full = fit_full(&s, None).unwrap();
    let (a_hat, b_hat) = grid_oracle(&s);
    let l_hat = ll(&s, a_hat, b_hat);

    let at = alpha_tests(&s, &full, 0.1).unwrap();
    let b_tilde = golden_max(|b| ll(&s, 0.1, b), 20.0, 120.0);
    let lr = 2.0 * (l_hat - ll(&s, 0.1, b_tilde));
    let grad = score(&BsParams::new(0.1, b_tilde).unwrap(), &s).alpha * (a_hat - 0.1);
    assert!((at.lr.statistic - lr).abs() < 1e-4);
    assert!((at.gradient.statistic - grad).abs() < 1e-4 * grad.abs().max(1.0));

    let bt = beta_tests(&s, &full, 54.0).unwrap();
    let a_tilde = golden_max(|a| ll(&s, a, 54.0), 0.01, 2.0);
    let lr = 2.0 * (l_hat - ll(&s, a_tilde, 54.0));
    let grad = score(&BsParams::new(a_tilde, 54.0).unwrap(), &s).beta * (b_hat - 54.0);
    assert!((bt.lr.statistic - lr).abs() < 1e-4);
    assert!((bt.gradient.statistic - grad).abs() < 1e-4);
}

#[test]
fn censored_mice_statistics_reference_values() {
    // n = 10: frozen from an independent scipy evaluation of the same likelihood
    let s = mice(10);
    let full = fit_full(&s, None).unwrap();
    let at = alpha_tests(&s, &full, 0.1).unwrap();
    let bt = beta_tests(&s, &full, 54.0).unwrap();
    assert!((at.lr.statistic - 6.912_317).abs() < 1e-4);
    assert!((at.gradient.statistic - 11.729_09).abs() < 1e-3);
    assert!((at.adjusted.unwrap().statistic - 17.203_60).abs() < 1e-3);
    assert!((bt.lr.statistic - 0.142_397).abs() < 1e-4);
    assert!((bt.gradient.statistic - 0.145_987).abs() < 1e-4);
}

#[test]
fn local_maximum_audit() {
    let s = mice(10);
    let fit = fit_full(&s, None).unwrap();
    let (a, b) = (fit.params.alpha(), fit.params.beta());
    for i in 0..50 {
        for j in 0..50 {
            let aa = a * (0.5 + i as f64 / 49.0);
            let bb = b * (0.5 + j as f64 / 49.0);
            assert!(ll(&s, aa, bb) <= fit.loglik + 1e-10);
        }
    }
}

#[test]
fn fits_are_scale_equivariant() {
    let s = mice(10);
    let base = fit_full(&s, None).unwrap();
    for k in [0.1, 10.0] {
        let f = fit_full(&s.scaled(k).unwrap(), None).unwrap();
        assert!((f.params.alpha() / base.params.alpha() - 1.0).abs() < 1e-8);
        assert!((f.params.beta() / (k * base.params.beta()) - 1.0).abs() < 1e-8);
    }
}
