use bs_censored::simulation::replication_rng;
use bs_censored::{alpha_tests, beta_tests, chi2_upper_tail, fit_full, BsParams, CensoredSample};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = BsParams> {
    (0.05f64..5.0, 0.01f64..100.0).prop_map(|(a, b)| BsParams::new(a, b).unwrap())
}

fn sample(p: BsParams, n: usize, m: usize, seed: u64) -> CensoredSample {
    p.sample_type2(n, m, &mut replication_rng(seed, 0)).unwrap()
}

proptest! {
    #[test]
    fn cdf_scales_with_beta(p in params(), k in 0.01f64..100.0, t in 0.01f64..100.0) {
        let q = BsParams::new(p.alpha(), k * p.beta()).unwrap();
        let (x, y) = (p.cdf(t).unwrap(), q.cdf(k * t).unwrap());
        prop_assert!((x - y).abs() <= 1e-13);
    }

    #[test]
    fn reciprocal_reflects_cdf(p in params(), t in 0.01f64..100.0) {
        let r = p.reciprocal();
        prop_assert!((r.beta() - 1.0 / p.beta()).abs() <= 1e-12 * r.beta());
        prop_assert!((p.cdf(t).unwrap() - r.sf(1.0 / t).unwrap()).abs() <= 1e-13);
    }

    #[test]
    fn cdf_is_monotone(p in params(), t in 0.01f64..100.0, dt in 1e-6f64..10.0) {
        prop_assert!(p.cdf(t).unwrap() <= p.cdf(t + dt).unwrap());
        prop_assert!(p.sf(t).unwrap() >= p.sf(t + dt).unwrap());
    }

    #[test]
    fn quantile_inverts_cdf(p in params(), u in 1e-9f64..(1.0 - 1e-9)) {
        let t = p.quantile(u).unwrap();
        prop_assert!((p.cdf(t).unwrap() - u).abs() <= 1e-10);
    }

    #[test]
    fn density_is_unimodal(p in params()) {
        // along a log grid the density rises and then falls at most once
        let grid: Vec<f64> = (0..400)
            .map(|i| p.beta() * (-8.0 + 16.0 * i as f64 / 399.0).exp())
            .map(|t| p.ln_pdf(t).unwrap())
            .collect();
        let mut falling = false;
        for w in grid.windows(2) {
            if w[1] < w[0] - 1e-12 {
                falling = true;
            } else if falling {
                prop_assert!(w[1] <= w[0] + 1e-12, "second rise in log density");
            }
        }
    }

    #[test]
    fn chi2_tail_decreases(x in 0.0f64..50.0, dx in 1e-6f64..5.0) {
        prop_assert!(chi2_upper_tail(x + dx).unwrap() <= chi2_upper_tail(x).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn statistics_invariant_under_rescaling(
        alpha in 0.2f64..1.5,
        seed in 0u64..1000,
        m in 6usize..20,
        k in prop_oneof![Just(0.1), Just(10.0)],
    ) {
        let s = sample(BsParams::new(alpha, 1.0).unwrap(), 20, m, seed);
        let sk = s.scaled(k).unwrap();
        let (f, fk) = (fit_full(&s, None).unwrap(), fit_full(&sk, None).unwrap());
        let a = alpha_tests(&s, &f, 0.5).unwrap();
        let ak = alpha_tests(&sk, &fk, 0.5).unwrap();
        prop_assert!((a.lr.statistic - ak.lr.statistic).abs() <= 1e-6 * a.lr.statistic.max(1.0));
        prop_assert!((a.gradient.statistic - ak.gradient.statistic).abs()
            <= 1e-6 * a.gradient.statistic.abs().max(1.0));
        let b = beta_tests(&s, &f, 1.2).unwrap();
        let bk = beta_tests(&sk, &fk, 1.2 * k).unwrap();
        prop_assert!((b.lr.statistic - bk.lr.statistic).abs() <= 1e-6 * b.lr.statistic.max(1.0));
        prop_assert!((b.gradient.statistic - bk.gradient.statistic).abs()
            <= 1e-6 * b.gradient.statistic.abs().max(1.0));
    }

    #[test]
    fn p_values_fall_as_statistics_grow(seed in 0u64..1000) {
        let s = sample(BsParams::new(0.5, 1.0).unwrap(), 30, 24, seed);
        let f = fit_full(&s, None).unwrap();
        let a_hat = f.params.alpha();
        // moving the null away from the estimate raises LR and lowers its p-value
        let mut last = (f64::NEG_INFINITY, f64::INFINITY);
        for step in 1..=6 {
            let t = alpha_tests(&s, &f, a_hat * (1.0 + 0.1 * step as f64)).unwrap();
            prop_assert!(t.lr.statistic > last.0);
            prop_assert!(t.lr.p_value < last.1);
            prop_assert!((t.lr.p_value - chi2_upper_tail(t.lr.statistic).unwrap()).abs() < 1e-15);
            last = (t.lr.statistic, t.lr.p_value);
        }
    }
}
