use std::fs;
use std::path::Path;

use logitcmp::harness::{
    aggregate, load_replications, split_indices, write_aggregates_csv, Manifest, RecordStatus, RunSpec, UnitInfo,
    AGGREGATES_FILE, FIGURE_FILE, MANIFEST_FILE, REPLICATIONS_FILE,
};
use logitcmp::simgen::CalibrationCache;
use logitcmp::{
    fit_stepml, load_csv, predict_mu, run_application, run_grid, run_replication, seeds,
    ApplicationSpec, Arm, Calibration, ColumnRef, Dataset, Error, IngestSpec, Method, PathConfig, PipelineConfig,
    RunOptions, ScenarioConfig, StepwiseConfig,
};
use rand::Rng;
use rand_distr::StandardNormal;

fn small_grid() -> Vec<ScenarioConfig> {
    vec![
        ScenarioConfig {
            p: 10,
            n: 100,
            ore: 0.5,
            rho: 0.5,
            n_reps: 4,
            master_seed: 3,
        },
        ScenarioConfig {
            p: 10,
            n: 200,
            ore: 0.2,
            rho: 0.9,
            n_reps: 3,
            master_seed: 3,
        },
    ]
}

fn opts(dir: &Path) -> RunOptions<'static> {
    RunOptions {
        parallelism: 1,
        out_dir: Some(dir.to_path_buf()),
        on_replication: None,
    }
}

fn noise(seed: u64, n: usize, p: usize) -> Dataset<f64> {
    let mut rng = seeds::rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let y: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    Dataset::from_rows(&rows, &y).unwrap()
}

#[test]
fn interrupted_grid_resumes_to_identical_outputs() {
    let grid = small_grid();
    let cfg = PipelineConfig::default();
    let full = tempfile::tempdir().unwrap();
    let first = run_grid(&grid, &cfg, &Calibration::default(), &opts(full.path())).unwrap();
    assert_eq!((first.executed, first.resumed), (7, 0));
    for f in [MANIFEST_FILE, REPLICATIONS_FILE, AGGREGATES_FILE, FIGURE_FILE] {
        assert!(full.path().join(f).exists(), "{f}");
    }

    // keep two complete replications and a torn third, as after a crash
    let part = tempfile::tempdir().unwrap();
    fs::copy(full.path().join(MANIFEST_FILE), part.path().join(MANIFEST_FILE)).unwrap();
    let text = fs::read_to_string(full.path().join(REPLICATIONS_FILE)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let arms = cfg.methods.len() + 1;
    let mut kept = lines[..1 + 2 * arms + 1].join("\n");
    kept.push_str("\np10_n100_ore0.5_rho0.5,2,Las");
    fs::write(part.path().join(REPLICATIONS_FILE), kept).unwrap();

    let resumed = run_grid(&grid, &cfg, &Calibration::default(), &opts(part.path())).unwrap();
    assert_eq!((resumed.executed, resumed.resumed), (5, 2));
    let read = |d: &Path| fs::read(d.join(AGGREGATES_FILE)).unwrap();
    assert_eq!(read(full.path()), read(part.path()));

    // nothing left to do
    let again = run_grid(&grid, &cfg, &Calibration::default(), &opts(part.path())).unwrap();
    assert_eq!((again.executed, again.resumed), (0, 7));
}

#[test]
fn aggregates_recompute_from_persisted_rows() {
    let grid = small_grid();
    let cfg = PipelineConfig::default();
    let dir = tempfile::tempdir().unwrap();
    let out = run_grid(&grid, &cfg, &Calibration::default(), &opts(dir.path())).unwrap();
    let arms: Vec<Arm> = cfg.methods.iter().map(|&m| Arm::Fit(m)).chain([Arm::Oracle]).collect();
    let reps = load_replications(&dir.path().join(REPLICATIONS_FILE), &arms).unwrap();
    let recomputed: Vec<_> = grid
        .iter()
        .map(|s| {
            let mine: Vec<_> = {
                let mut v: Vec<_> = reps.iter().filter(|r| r.scenario_id == s.id()).cloned().collect();
                v.sort_by_key(|r| r.rep_index);
                v
            };
            aggregate(UnitInfo::from(s), s.n_reps, &arms, &mine)
        })
        .collect();
    let mut buf = Vec::new();
    write_aggregates_csv(&mut buf, &recomputed).unwrap();
    assert_eq!(buf, fs::read(dir.path().join(AGGREGATES_FILE)).unwrap());
    for a in &out.aggregates {
        for s in &a.arms {
            let m = s.mean_gini.unwrap();
            assert!((-1.0..=1.0).contains(&m));
            assert!(s.sd_gini.unwrap() >= 0.0);
        }
    }
}

#[test]
fn manifest_describes_the_run_and_guards_resume() {
    let grid = small_grid();
    let dir = tempfile::tempdir().unwrap();
    run_grid(&grid[..1], &PipelineConfig::default(), &Calibration::default(), &opts(dir.path())).unwrap();
    let manifest = Manifest::read(&dir.path().join(MANIFEST_FILE)).unwrap();
    match &manifest.run {
        RunSpec::Simulation { scenarios, .. } => assert_eq!(scenarios, &grid[..1]),
        other => panic!("unexpected run {other:?}"),
    }
    let other = PipelineConfig {
        cv_folds: 5,
        ..PipelineConfig::default()
    };
    let err = run_grid(&grid[..1], &other, &Calibration::default(), &opts(dir.path())).unwrap_err();
    assert!(matches!(err, Error::ResumeMismatch(_)));
}

#[test]
fn single_replication_aggregate_is_that_replication() {
    let s = ScenarioConfig {
        n_reps: 1,
        ..small_grid()[0]
    };
    let out = run_grid(&[s], &PipelineConfig::default(), &Calibration::default(), &RunOptions::default()).unwrap();
    let truth = CalibrationCache::new(Calibration::default()).truth(&s).unwrap();
    let rep = run_replication(&s, &truth, 0, &PipelineConfig::default());
    for m in [Method::Lasso, Method::LassoMl, Method::StepMl] {
        assert_eq!(out.aggregates[0].mean(m), rep.gini(Arm::Fit(m)));
        assert_eq!(out.aggregates[0].summary(Arm::Fit(m)).unwrap().sd_gini, Some(0.0));
    }
    // identical apart from wall-clock timings
    let strip = |mut r: logitcmp::ReplicationResult| {
        r.records.iter_mut().for_each(|a| a.fit_ms = 0.0);
        r
    };
    assert_eq!(strip(rep), strip(run_replication(&s, &truth, 0, &PipelineConfig::default())));
}

#[test]
fn oracle_is_at_least_as_good_on_large_samples() {
    let s = ScenarioConfig {
        p: 10,
        n: 1000,
        ore: 0.5,
        rho: 0.5,
        n_reps: 20,
        master_seed: 5,
    };
    let out = run_grid(&[s], &PipelineConfig::default(), &Calibration::default(), &RunOptions::default()).unwrap();
    let agg = &out.aggregates[0];
    let oracle = agg.summary(Arm::Oracle).unwrap().mean_gini.unwrap();
    for m in [Method::Lasso, Method::LassoMl, Method::StepMl] {
        let s = agg.summary(Arm::Fit(m)).unwrap();
        assert!(oracle >= s.mean_gini.unwrap() - 2.0 * s.sd_gini.unwrap(), "{m}");
    }
}

#[test]
fn perfectly_predictive_covariate() {
    let spec = IngestSpec::new(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/predictive.csv"),
        ColumnRef::Name("outcome".into()),
        "case",
    );
    let (data, report) = load_csv(&spec).unwrap();
    assert_eq!(report.p, 4);
    let app = ApplicationSpec {
        name: "predictive".into(),
        n_splits: 10,
        master_seed: 1,
        source: Some(spec),
    };
    let out = run_application(&data, &app, &PipelineConfig::default(), &RunOptions::default()).unwrap();
    let agg = &out.aggregates[0];
    assert_eq!((agg.unit.n, agg.unit.p), (120, 4));
    assert!(agg.mean(Method::Lasso).unwrap() >= 0.99);
    assert_eq!(agg.arms.len(), 3);
    assert!(agg.arms.iter().all(|s| s.sd_gini.is_some()));
    let again = run_application(&data, &app, &PipelineConfig::default(), &RunOptions::default()).unwrap();
    assert_eq!(again.aggregates, out.aggregates);
}

#[test]
fn wide_application_favours_lasso() {
    // p ≫ n with many small effects, the regime where stepwise overfits
    let mut rng = seeds::rng(77);
    let (n, p) = (80, 200);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let y: Vec<bool> = rows
        .iter()
        .map(|r| {
            let eta: f64 = (0..20).map(|j| if j % 2 == 0 { 0.5 * r[j] } else { -0.5 * r[j] }).sum();
            rng.random::<f64>() < logitcmp::sigmoid(eta)
        })
        .collect();
    let data = Dataset::from_rows(&rows, &y).unwrap();
    let app = ApplicationSpec {
        name: "wide".into(),
        n_splits: 20,
        master_seed: 2,
        source: None,
    };
    let out = run_application(&data, &app, &PipelineConfig::default(), &RunOptions::default()).unwrap();
    let agg = &out.aggregates[0];
    assert!(agg.mean(Method::Lasso).unwrap() > agg.mean(Method::StepMl).unwrap());
}

#[test]
fn intercept_only_models_score_zero() {
    let data = noise(9, 40, 2);
    let model = logitcmp::FittedModel::intercept_only(0.3, 2, Method::Lasso, true);
    let scores: Vec<f64> = (0..data.n()).map(|i| predict_mu(&model, data.row(i)).unwrap()).collect();
    assert_eq!(logitcmp::metrics::gini_of(&scores, data.y().as_slice().unwrap()).unwrap(), 0.0);
}

#[test]
fn constant_covariates_are_recorded_not_fatal() {
    let rows: Vec<Vec<f64>> = (0..60).map(|_| vec![1.0, -2.0]).collect();
    let y: Vec<bool> = (0..60).map(|i| i % 3 == 0).collect();
    let data = Dataset::from_rows(&rows, &y).unwrap();
    let app = ApplicationSpec {
        name: "flat".into(),
        n_splits: 2,
        master_seed: 0,
        source: None,
    };
    let out = run_application(&data, &app, &PipelineConfig::default(), &RunOptions::default()).unwrap();
    let agg = &out.aggregates[0];
    // no penalizable column: the lasso arms fail and are counted as such
    assert_eq!(agg.summary(Arm::Fit(Method::Lasso)).unwrap().n_valid, 0);
    assert_eq!(agg.mean(Method::StepMl), Some(0.0));
}

#[test]
fn single_class_test_sets_are_excluded_not_resampled() {
    // two positives: one lands in training and one in test, so every
    // split is valid; with one positive, splitting fails and is recorded
    let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64]).collect();
    let y: Vec<bool> = (0..30).map(|i| i == 4).collect();
    let data = Dataset::from_rows(&rows, &y).unwrap();
    assert!(split_indices(&data, 0.7, 0).is_err());
    let s = ScenarioConfig {
        p: 10,
        n: 100,
        ore: 0.5,
        rho: 0.5,
        n_reps: 1,
        master_seed: 0,
    };
    let truth = CalibrationCache::new(Calibration::default()).truth(&s).unwrap();
    let rep = run_replication(&s, &truth, 0, &PipelineConfig::default());
    assert!(rep.records.iter().all(|r| r.status != RecordStatus::InvalidTest));
}

#[test]
fn pure_noise_cv_has_no_skill() {
    let cfg = PathConfig::default();
    let mut near_null = 0;
    let mut total = 0.0;
    for seed in 0..100 {
        let data = noise(seed, 500, 10);
        let (train, test) = logitcmp::split_train_test(&data, 0.7, seed).unwrap();
        let fit = logitcmp::fit_lasso_cv(&train, 10, seed, &cfg).unwrap();
        if fit.cv.chosen_lambda >= 0.5 * fit.cv.lambdas[0] {
            near_null += 1;
        }
        let scores: Vec<f64> = (0..test.n()).map(|i| predict_mu(&fit.model, test.row(i)).unwrap()).collect();
        total += logitcmp::metrics::gini_of(&scores, test.y().as_slice().unwrap()).unwrap().abs();
    }
    // the chosen λ sits wherever noise peaks the validation AUC curve
    eprintln!("chosen λ ≥ λ_max/2 in {near_null} of 100 runs");
    assert!(total / 100.0 < 0.1, "mean |Gini| {}", total / 100.0);
}

#[test]
fn pure_noise_stepwise_has_no_skill() {
    let mut total = 0.0;
    for seed in 0..100 {
        let data = noise(1000 + seed, 500, 10);
        let (train, test) = logitcmp::split_train_test(&data, 0.7, seed).unwrap();
        let model = fit_stepml(&train, &StepwiseConfig::default()).unwrap();
        let scores: Vec<f64> = (0..test.n()).map(|i| predict_mu(&model, test.row(i)).unwrap()).collect();
        total += logitcmp::metrics::gini_of(&scores, test.y().as_slice().unwrap()).unwrap().abs();
    }
    assert!(total / 100.0 < 0.1, "mean |Gini| {}", total / 100.0);
}
