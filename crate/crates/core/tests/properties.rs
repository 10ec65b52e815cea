//! Property tests for the invariants of each module, over seeded random
//! datasets.

use logitcmp::lasso::{fit_lasso_path, StandardizedDesign};
use logitcmp::mle::fit_mle_detailed;
use logitcmp::selection::fit_stepml_traced;
use logitcmp::simgen::{gen_covariates, CalibrationCache};
use logitcmp::{
    choose_lambda_cv, fit_lasso_cv, fit_lassoml, fit_mle, gen_dataset, log_likelihood, log_likelihood_gradient,
    make_folds, predict_mu, probability, seeds, Calibration, Dataset, FittedModel, IrlsConfig, Method, MleStatus,
    PathConfig, ScenarioConfig, StepwiseConfig, TruthSpec,
};
use ndarray::{array, Array1};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

/// Gaussian covariates with a logistic outcome; resampled until each class has
/// at least `min_class` rows.
fn dataset(seed: u64, n: usize, p: usize, signal: f64, min_class: usize) -> Dataset<f64> {
    let mut rng = seeds::rng(seed);
    loop {
        let beta: Vec<f64> = (0..p).map(|_| signal * rng.sample::<f64, _>(StandardNormal)).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let y: Vec<bool> = rows
            .iter()
            .map(|r| {
                let eta: f64 = r.iter().zip(&beta).map(|(x, b)| x * b).sum();
                rng.random::<f64>() < probability(eta)
            })
            .collect();
        let d = Dataset::from_rows(&rows, &y).unwrap();
        if d.positives() >= min_class && d.negatives() >= min_class {
            return d;
        }
    }
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mu_increasing_and_symmetric(a in -30.0f64..30.0, d in 1e-6f64..10.0) {
        let (lo, hi) = (probability(a), probability(a + d));
        prop_assert!(lo < hi);
        prop_assert!((probability(a) + probability(-a) - 1.0).abs() <= 1e-12);
        let model = FittedModel { alpha: a, ..FittedModel::intercept_only(0.0, 1, Method::Mle, true) };
        prop_assert_eq!(predict_mu(&model, array![0.0].view()).unwrap(), lo);
    }

    #[test]
    fn log_likelihood_strictly_negative(seed in any::<u64>(), scale in 0.0f64..50.0) {
        let data = dataset(seed, 20, 3, 1.0, 1);
        let mut rng = seeds::rng(seed ^ 1);
        let mut model = FittedModel::intercept_only(scale * rng.sample::<f64, _>(StandardNormal), 3, Method::Mle, true);
        model.beta = Array1::from_shape_fn(3, |_| scale * rng.sample::<f64, _>(StandardNormal));
        prop_assert!(log_likelihood(&model, &data).unwrap() < 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>()) {
        let data = dataset(seed, 25, 3, 1.0, 1);
        let mut rng = seeds::rng(seed ^ 2);
        let mut model = FittedModel::intercept_only(rng.sample::<f64, _>(StandardNormal), 3, Method::Mle, true);
        model.beta = Array1::from_shape_fn(3, |_| rng.sample::<f64, _>(StandardNormal));
        let g = log_likelihood_gradient(&model, &data).unwrap();
        let h = 1e-5;
        for k in 0..4 {
            let at = |d: f64| {
                let mut m = model.clone();
                if k == 0 { m.alpha += d } else { m.beta[k - 1] += d }
                log_likelihood(&m, &data).unwrap()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() <= 1e-5 * max_abs(g.iter().copied()).max(1.0));
        }
    }

    #[test]
    fn irls_monotone_and_stationary(seed in any::<u64>(), n in 30usize..120, mask in 0u8..32) {
        let p = 5;
        let data = dataset(seed, n, p, 0.7, 3);
        let cols: Vec<usize> = (0..p).filter(|j| mask & (1 << j) != 0).collect();
        let fit = fit_mle_detailed(&data, &cols, &IrlsConfig::default(), None).unwrap();
        for w in fit.trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12 * w[0].abs());
        }
        for j in (0..p).filter(|j| !cols.contains(j)) {
            prop_assert_eq!(fit.model.beta[j], 0.0);
        }
        if fit.status == MleStatus::Converged {
            let g = log_likelihood_gradient(&fit.model, &data).unwrap();
            prop_assert!(g[0].abs() <= 1e-6 * n as f64);
            for &j in &cols {
                prop_assert!(g[j + 1].abs() <= 1e-6 * n as f64, "component {} = {}", j, g[j + 1]);
            }
        }
    }

    #[test]
    fn lasso_path_invariants(seed in any::<u64>(), n in 40usize..150, p in 2usize..20) {
        let data = dataset(seed, n, p, 0.4, 3);
        let path = fit_lasso_path(&data, &PathConfig::default()).unwrap();
        let design = StandardizedDesign::new(&data);
        for (k, (sol, &lam)) in path.standardized.iter().zip(&path.lambdas).enumerate() {
            prop_assert!(design.kkt_violation(sol.intercept, &sol.coefs, lam) <= 1e-5);
            for w in sol.objective_trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs());
            }
            if k > 0 {
                let prev = &path.standardized[k - 1].coefs;
                prop_assert!(max_abs(prev.iter().zip(&sol.coefs).map(|(a, b)| a - b)) < 1.0);
            }
            let std_eta = design.eta(sol.intercept, &sol.coefs);
            let orig_eta = path.solutions[k].linear_predictors(&data).unwrap();
            for (a, b) in std_eta.iter().zip(&orig_eta) {
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn cv_invariants(seed in any::<u64>(), n in 40usize..120, k in 2usize..11) {
        let data = dataset(seed, n, 6, 0.6, 4);
        let cv = choose_lambda_cv(&data, k, seed, &PathConfig { n_lambda: 20, ..PathConfig::default() }).unwrap();
        prop_assert!(cv.lambdas.contains(&cv.chosen_lambda));
        prop_assert_eq!(cv.lambdas[cv.chosen_index], cv.chosen_lambda);
        prop_assert!(cv.mean_auc.iter().all(|a| (0.0..=1.0).contains(a)));
        let folds = make_folds(&data, k, seed).unwrap();
        for f in 0..folds.k {
            let val = folds.validation_rows(f);
            let train = folds.training_rows(f);
            prop_assert!(val.iter().all(|i| !train.contains(i)));
            prop_assert_eq!(val.len() + train.len(), n);
        }
    }

    #[test]
    fn stepwise_aic_never_increases(seed in any::<u64>(), n in 40usize..100, full in any::<bool>()) {
        let p = 6;
        let data = dataset(seed, n, p, 0.5, 4);
        let cfg = StepwiseConfig {
            start: if full { logitcmp::StartModel::Full } else { logitcmp::StartModel::InterceptOnly },
            ..StepwiseConfig::default()
        };
        let (model, trace) = fit_stepml_traced(&data, &cfg).unwrap();
        for w in trace.aic_path.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        for j in (0..p).filter(|j| !model.support.contains(j)) {
            prop_assert_eq!(model.beta[j], 0.0);
        }
    }

    #[test]
    fn lassoml_support_is_lasso_support(seed in any::<u64>(), n in 40usize..100) {
        let p = 8;
        let data = dataset(seed, n, p, 0.5, 4);
        let path_cfg = PathConfig { n_lambda: 30, ..PathConfig::default() };
        let lasso = fit_lasso_cv(&data, 5, seed, &path_cfg).unwrap();
        let refit = fit_lassoml(&data, 5, seed, &path_cfg, &IrlsConfig::default()).unwrap();
        prop_assert_eq!(&refit.support, &lasso.model.nonzero_support());
        for j in (0..p).filter(|j| !refit.support.contains(j)) {
            prop_assert_eq!(refit.beta[j], 0.0);
        }
    }

    #[test]
    fn truth_pattern(p in 1usize..80) {
        let (beta, noise) = TruthSpec::coefficients(p);
        prop_assert_eq!(noise, (0.8 * p as f64).floor() as usize);
        prop_assert_eq!(beta.iter().filter(|&&b| b != 0.0).count(), p - noise);
        for (k, &b) in beta[noise..].iter().enumerate() {
            prop_assert_eq!(b, if k % 2 == 0 { 0.5 } else { -0.5 });
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn covariate_means_near_zero(seed in any::<u64>(), rho in 0.0f64..0.95) {
        let n = 20_000;
        let x = gen_covariates(n, 5, rho, seed).unwrap();
        for j in 0..5 {
            let m = x.column(j).sum() / n as f64;
            prop_assert!(m.abs() <= 5.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn generator_stack_is_deterministic(seed in any::<u64>(), rep in 0usize..1000) {
        let s = ScenarioConfig { p: 10, n: 100, ore: 0.2, rho: 0.9, n_reps: 1, master_seed: seed };
        let truth = CalibrationCache::new(Calibration::default()).truth(&s).unwrap();
        let a = gen_dataset(&s, &truth, rep).unwrap();
        let b = gen_dataset(&s, &truth, rep).unwrap();
        prop_assert_eq!(a.x(), b.x());
        prop_assert_eq!(a.y(), b.y());
        let c = gen_dataset(&s, &truth, rep + 1).unwrap();
        prop_assert_ne!(a.x(), c.x());
    }
}

#[test]
fn mle_on_well_conditioned_data_converges() {
    let data = dataset(3, 500, 4, 0.5, 10);
    let m = fit_mle(&data, &[0, 1, 2, 3], &IrlsConfig::default()).unwrap();
    assert!(m.converged);
    assert_eq!(m.support, vec![0, 1, 2, 3]);
}
