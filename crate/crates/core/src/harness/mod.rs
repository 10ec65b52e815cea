//! Monte Carlo and repeated-split experiments: each replication splits the
//! data 70/30 (stratified), fits every pipeline on the training part and
//! scores the test part by Gini. Replications run in parallel, are persisted
//! as they finish, and are folded into per-method means and SDs in
//! replication order.

mod store;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use store::{
    load_replications, write_aggregates_csv, write_figure_csv, Manifest, RunSpec, RunStore, AGGREGATES_FILE, FIGURE_FILE,
    MANIFEST_FILE, REPLICATIONS_FILE,
};

use crate::error::{Error, Result};
use crate::ingest::IngestSpec;
use crate::lasso::PathConfig;
use crate::metrics::gini_of;
use crate::mle::{fit_mle, IrlsConfig};
use crate::model::{sigmoid, Dataset, FittedModel, Method};
use crate::seeds::{self, stream};
use crate::selection::{fit_stepml, refit_support, StepwiseConfig};
use crate::simgen::{gen_dataset, Calibration, CalibrationCache, ScenarioConfig, TruthSpec};
use crate::tuning::fit_lasso_cv;

/// Everything that shapes a fit apart from the data and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub methods: Vec<Method>,
    pub cv_folds: usize,
    pub train_frac: f64,
    pub path: PathConfig<f64>,
    /// Used by the LassoML refit and the plain MLE pipeline.
    pub irls: IrlsConfig<f64>,
    pub stepwise: StepwiseConfig<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            methods: vec![Method::Lasso, Method::LassoMl, Method::StepMl],
            cv_folds: 10,
            train_frac: 0.7,
            path: PathConfig::default(),
            irls: IrlsConfig::default(),
            stepwise: StepwiseConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("no methods requested".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::InvalidInput("duplicate method".into()));
        }
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return Err(Error::InvalidInput(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_frac
            )));
        }
        if self.cv_folds < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 folds, got {}", self.cv_folds)));
        }
        self.path.validate()?;
        self.irls.validate()?;
        self.stepwise.irls.validate()
    }
}

/// A fitted pipeline or the true model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arm {
    Fit(Method),
    Oracle,
}

impl Arm {
    pub fn as_str(self) -> &'static str {
        match self {
            Arm::Fit(m) => m.as_str(),
            Arm::Oracle => "Oracle",
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Oracle" => Arm::Oracle,
            "MLE" => Arm::Fit(Method::Mle),
            "Lasso" => Arm::Fit(Method::Lasso),
            "StepML" => Arm::Fit(Method::StepMl),
            "LassoML" => Arm::Fit(Method::LassoMl),
            other => return Err(Error::InvalidInput(format!("unknown method {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordStatus {
    Ok,
    /// Fit finished without meeting its convergence criterion; still scored.
    NotConverged,
    /// LassoML kept the lasso coefficients.
    LassoFallback,
    /// Fit raised an error; no score.
    Failed,
    /// Split or test set unusable (single class); no score.
    InvalidTest,
}

impl RecordStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordStatus::Ok => "ok",
            RecordStatus::NotConverged => "not_converged",
            RecordStatus::LassoFallback => "lasso_fallback",
            RecordStatus::Failed => "failed",
            RecordStatus::InvalidTest => "invalid_test",
        }
    }
}

impl FromStr for RecordStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ok" => RecordStatus::Ok,
            "not_converged" => RecordStatus::NotConverged,
            "lasso_fallback" => RecordStatus::LassoFallback,
            "failed" => RecordStatus::Failed,
            "invalid_test" => RecordStatus::InvalidTest,
            other => return Err(Error::InvalidInput(format!("unknown status {other:?}"))),
        })
    }
}

/// One arm's outcome in one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmRecord {
    pub arm: Arm,
    /// `None` marks an invalid replication for this arm.
    pub gini: Option<f64>,
    pub model_size: usize,
    pub status: RecordStatus,
    /// Wall time of the fit in milliseconds; informational only.
    pub fit_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub scenario_id: String,
    pub rep_index: usize,
    pub records: Vec<ArmRecord>,
}

impl ReplicationResult {
    pub fn record(&self, arm: Arm) -> Option<&ArmRecord> {
        self.records.iter().find(|r| r.arm == arm)
    }

    pub fn gini(&self, arm: Arm) -> Option<f64> {
        self.record(arm).and_then(|r| r.gini)
    }
}

/// Stratified split: within each class the rows are shuffled and the first
/// ceil(train_frac·count) go to training, leaving at least one row of every
/// class on each side. Both parts keep the original row order.
pub fn split_indices<F: crate::Scalar>(data: &Dataset<F>, train_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::InvalidInput(format!("train fraction must lie in (0, 1), got {train_frac}")));
    }
    let (neg, pos) = data.class_indices();
    let mut rng = seeds::rng(seed);
    let mut train = Vec::with_capacity(data.n());
    let mut test = Vec::new();
    for mut class in [pos, neg] {
        let c = class.len();
        if c == 0 {
            continue;
        }
        if c == 1 {
            return Err(Error::DegenerateData("cannot split a class with a single row".into()));
        }
        class.shuffle(&mut rng);
        let m = ((train_frac * c as f64 - 1e-9).ceil() as usize).clamp(1, c - 1);
        train.extend_from_slice(&class[..m]);
        test.extend_from_slice(&class[m..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_train_test<F: crate::Scalar>(data: &Dataset<F>, train_frac: f64, seed: u64) -> Result<(Dataset<F>, Dataset<F>)> {
    let (train, test) = split_indices(data, train_frac, seed)?;
    Ok((data.select_rows(&train)?, data.select_rows(&test)?))
}

/// A pipeline fitted on training data.
#[derive(Debug, Clone)]
pub struct PipelineFit {
    pub method: Method,
    pub outcome: std::result::Result<FittedModel<f64>, String>,
    pub fit_ms: f64,
}

impl PipelineFit {
    fn status(&self) -> RecordStatus {
        match &self.outcome {
            Err(_) => RecordStatus::Failed,
            Ok(m) if m.lasso_fallback => RecordStatus::LassoFallback,
            Ok(m) if !m.converged => RecordStatus::NotConverged,
            Ok(_) => RecordStatus::Ok,
        }
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Fits every configured pipeline on `train`; only `train` is ever read.
pub fn fit_pipelines(train: &Dataset<f64>, config: &PipelineConfig, cv_seed: u64) -> Vec<PipelineFit> {
    let needs_lasso = config.methods.iter().any(|m| matches!(m, Method::Lasso | Method::LassoMl));
    let start = Instant::now();
    let lasso = needs_lasso.then(|| {
        fit_lasso_cv(train, config.cv_folds, cv_seed, &config.path)
            .map(|f| f.model)
            .map_err(|e| e.to_string())
    });
    let lasso_ms = elapsed_ms(start);

    config
        .methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let outcome = match method {
                Method::Lasso => lasso.clone().expect("lasso fitted"),
                Method::LassoMl => match lasso.as_ref().expect("lasso fitted") {
                    Ok(l) => refit_support(train, l, &config.irls).map_err(|e| e.to_string()),
                    Err(e) => Err(e.clone()),
                },
                Method::StepMl => fit_stepml(train, &config.stepwise).map_err(|e| e.to_string()),
                Method::Mle => {
                    let all: Vec<usize> = (0..train.p()).collect();
                    fit_mle(train, &all, &config.irls).map_err(|e| e.to_string())
                }
            };
            let mut fit_ms = elapsed_ms(start);
            if matches!(method, Method::Lasso | Method::LassoMl) {
                fit_ms += lasso_ms;
            }
            PipelineFit { method, outcome, fit_ms }
        })
        .collect()
}

/// Scores fitted pipelines (and optionally the true model) on `test`.
fn score(fits: &[PipelineFit], test: &Dataset<f64>, truth: Option<&TruthSpec>) -> Vec<ArmRecord> {
    let labels = test.y().as_slice().expect("contiguous outcomes");
    let valid = test.has_both_classes();
    let mut records: Vec<ArmRecord> = fits
        .iter()
        .map(|f| {
            let model_size = f.outcome.as_ref().map_or(0, |m| m.nonzero_support().len());
            let mut status = f.status();
            let gini = match (&f.outcome, valid) {
                (Err(_), _) => None,
                (Ok(_), false) => {
                    status = RecordStatus::InvalidTest;
                    None
                }
                (Ok(m), true) => m
                    .predict_proba(test)
                    .ok()
                    .and_then(|s| gini_of(s.as_slice().expect("contiguous"), labels).ok()),
            };
            if gini.is_none() && status != RecordStatus::InvalidTest {
                status = RecordStatus::Failed;
            }
            ArmRecord {
                arm: Arm::Fit(f.method),
                gini,
                model_size,
                status,
                fit_ms: f.fit_ms,
            }
        })
        .collect();
    if let Some(t) = truth {
        let scores: Vec<f64> = (0..test.n()).map(|i| sigmoid(t.linear_predictor(test.row(i)))).collect();
        let gini = if valid { gini_of(&scores, labels).ok() } else { None };
        records.push(ArmRecord {
            arm: Arm::Oracle,
            gini,
            model_size: t.beta_true.iter().filter(|&&b| b != 0.0).count(),
            status: if valid { RecordStatus::Ok } else { RecordStatus::InvalidTest },
            fit_ms: 0.0,
        });
    }
    records
}

fn invalid_records(arms: &[Arm], status: RecordStatus) -> Vec<ArmRecord> {
    arms.iter()
        .map(|&arm| ArmRecord {
            arm,
            gini: None,
            model_size: 0,
            status,
            fit_ms: 0.0,
        })
        .collect()
}

/// The split and fits one replication makes under `rep_seed`, returning the
/// fitted pipelines and the held-out test set.
pub fn split_and_fit(data: &Dataset<f64>, config: &PipelineConfig, rep_seed: u64) -> Result<(Vec<PipelineFit>, Dataset<f64>)> {
    let (train, test) = split_train_test(data, config.train_frac, seeds::derive(rep_seed, &[stream::SPLIT]))?;
    let fits = fit_pipelines(&train, config, seeds::derive(rep_seed, &[stream::FOLDS]));
    Ok((fits, test))
}

/// Split, fit and score one dataset under `rep_seed`.
fn replicate(
    data: &Dataset<f64>,
    truth: Option<&TruthSpec>,
    config: &PipelineConfig,
    unit_id: &str,
    rep_index: usize,
    rep_seed: u64,
) -> ReplicationResult {
    let records = match split_and_fit(data, config, rep_seed) {
        Ok((fits, test)) => score(&fits, &test, truth),
        Err(_) => invalid_records(&arms_of(config, truth.is_some()), RecordStatus::InvalidTest),
    };
    ReplicationResult {
        scenario_id: unit_id.to_string(),
        rep_index,
        records,
    }
}

pub(crate) fn arms_of(config: &PipelineConfig, oracle: bool) -> Vec<Arm> {
    let mut arms: Vec<Arm> = config.methods.iter().map(|&m| Arm::Fit(m)).collect();
    if oracle {
        arms.push(Arm::Oracle);
    }
    arms
}

/// Generate → split → fit → score for one simulated replication.
pub fn run_replication(
    scenario: &ScenarioConfig,
    truth: &TruthSpec,
    rep_index: usize,
    config: &PipelineConfig,
) -> ReplicationResult {
    let id = scenario.id();
    match gen_dataset(scenario, truth, rep_index) {
        Ok(data) => replicate(&data, Some(truth), config, &id, rep_index, scenario.rep_seed(rep_index)),
        Err(_) => ReplicationResult {
            scenario_id: id,
            rep_index,
            records: invalid_records(&arms_of(config, true), RecordStatus::Failed),
        },
    }
}

/// Identifies the population an aggregate summarizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitInfo {
    pub id: String,
    pub p: usize,
    pub n: usize,
    /// Target outcome rate for simulations, observed rate for real data.
    pub ore: f64,
    pub rho: Option<f64>,
}

impl From<&ScenarioConfig> for UnitInfo {
    fn from(s: &ScenarioConfig) -> Self {
        Self {
            id: s.id(),
            p: s.p,
            n: s.n,
            ore: s.ore,
            rho: Some(s.rho),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmSummary {
    pub arm: Arm,
    /// `None` when no replication was valid.
    pub mean_gini: Option<f64>,
    /// Sample SD (n − 1 denominator); 0 for a single valid replication.
    pub sd_gini: Option<f64>,
    pub n_valid: usize,
    pub mean_model_size: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub unit: UnitInfo,
    pub n_reps: usize,
    pub arms: Vec<ArmSummary>,
}

impl AggregateResult {
    pub fn summary(&self, arm: Arm) -> Option<&ArmSummary> {
        self.arms.iter().find(|a| a.arm == arm)
    }

    pub fn mean(&self, method: Method) -> Option<f64> {
        self.summary(Arm::Fit(method)).and_then(|s| s.mean_gini)
    }
}

/// Folds replications (sorted by index) into per-arm summaries.
pub fn aggregate(unit: UnitInfo, n_reps: usize, arms: &[Arm], reps: &[ReplicationResult]) -> AggregateResult {
    let arms = arms
        .iter()
        .map(|&arm| {
            let valid: Vec<&ArmRecord> = reps
                .iter()
                .filter_map(|r| r.record(arm))
                .filter(|r| r.gini.is_some())
                .collect();
            let k = valid.len();
            let (mean_gini, sd_gini, mean_model_size) = if k == 0 {
                (None, None, None)
            } else {
                let mean = valid.iter().map(|r| r.gini.unwrap()).sum::<f64>() / k as f64;
                let sd = if k == 1 {
                    0.0
                } else {
                    let ss = valid.iter().map(|r| (r.gini.unwrap() - mean).powi(2)).sum::<f64>();
                    (ss / (k - 1) as f64).sqrt()
                };
                let size = valid.iter().map(|r| r.model_size as f64).sum::<f64>() / k as f64;
                (Some(mean), Some(sd), Some(size))
            };
            ArmSummary {
                arm,
                mean_gini,
                sd_gini,
                n_valid: k,
                mean_model_size,
            }
        })
        .collect();
    AggregateResult { unit, n_reps, arms }
}

/// Execution settings that do not affect results.
#[derive(Default)]
pub struct RunOptions<'a> {
    /// Worker threads; 0 uses the rayon default.
    pub parallelism: usize,
    /// Directory for persisted, resumable results; `None` keeps everything in memory.
    pub out_dir: Option<PathBuf>,
    pub on_replication: Option<&'a (dyn Fn(&ReplicationResult) + Sync)>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub aggregates: Vec<AggregateResult>,
    /// Replications computed in this call.
    pub executed: usize,
    /// Replications loaded from an earlier, interrupted run.
    pub resumed: usize,
}

/// Runs `jobs` (unit index, replication index) on a dedicated pool, persisting
/// each result as it completes, and aggregates per unit in replication order.
fn execute<J>(units: &[UnitInfo], n_reps: &[usize], arms: &[Arm], spec: RunSpec, opts: &RunOptions<'_>, job: J) -> Result<RunOutcome>
where
    J: Fn(usize, usize) -> ReplicationResult + Sync,
{
    let (store, mut done) = match &opts.out_dir {
        Some(dir) => {
            let (s, done) = RunStore::open(dir, spec, opts.parallelism, arms)?;
            (Some(s), done)
        }
        None => (None, HashMap::new()),
    };
    let resumed = done.len();
    let pending: Vec<(usize, usize)> = (0..units.len())
        .flat_map(|u| (0..n_reps[u]).map(move |r| (u, r)))
        .filter(|&(u, r)| !done.contains_key(&(units[u].id.clone(), r)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.parallelism)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let fresh: Vec<ReplicationResult> = pool.install(|| {
        pending
            .par_iter()
            .map(|&(u, r)| {
                let res = job(u, r);
                if let Some(s) = &store {
                    s.append(&res)?;
                }
                if let Some(cb) = opts.on_replication {
                    cb(&res);
                }
                Ok(res)
            })
            .collect::<Result<_>>()
    })?;
    let executed = fresh.len();
    for res in fresh {
        done.insert((res.scenario_id.clone(), res.rep_index), res);
    }

    let mut aggregates = Vec::with_capacity(units.len());
    for (u, unit) in units.iter().enumerate() {
        let reps: Vec<ReplicationResult> = (0..n_reps[u])
            .map(|r| done.remove(&(unit.id.clone(), r)).expect("every replication executed"))
            .collect();
        aggregates.push(aggregate(unit.clone(), n_reps[u], arms, &reps));
    }
    if let Some(s) = &store {
        s.write_aggregates(&aggregates)?;
    }
    Ok(RunOutcome {
        aggregates,
        executed,
        resumed,
    })
}

/// Runs every replication of every scenario; see [`RunOptions`] for
/// persistence and resumption.
pub fn run_grid(
    scenarios: &[ScenarioConfig],
    config: &PipelineConfig,
    calibration: &Calibration,
    opts: &RunOptions<'_>,
) -> Result<RunOutcome> {
    if scenarios.is_empty() {
        return Err(Error::InvalidInput("empty scenario list".into()));
    }
    config.validate()?;
    let mut ids: Vec<String> = scenarios.iter().map(|s| s.id()).collect();
    ids.sort();
    ids.dedup();
    if ids.len() != scenarios.len() {
        return Err(Error::InvalidInput("duplicate scenario".into()));
    }
    let cache = CalibrationCache::new(*calibration);
    let truths: Vec<TruthSpec> = scenarios.iter().map(|s| cache.truth(s)).collect::<Result<_>>()?;
    let units: Vec<UnitInfo> = scenarios.iter().map(UnitInfo::from).collect();
    let n_reps: Vec<usize> = scenarios.iter().map(|s| s.n_reps).collect();
    let spec = RunSpec::Simulation {
        scenarios: scenarios.to_vec(),
        calibration: *calibration,
        pipeline: config.clone(),
    };
    execute(&units, &n_reps, &arms_of(config, true), spec, opts, |u, r| {
        run_replication(&scenarios[u], &truths[u], r, config)
    })
}

/// Hash of a dataset's values, used to tie persisted results to their input.
pub fn data_fingerprint(data: &Dataset<f64>) -> u64 {
    let mut bytes = Vec::with_capacity(8 * (data.n() * (data.p() + 1) + 2));
    bytes.extend_from_slice(&(data.n() as u64).to_le_bytes());
    bytes.extend_from_slice(&(data.p() as u64).to_le_bytes());
    for j in 0..data.p() {
        for v in data.column(j) {
            bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        }
    }
    for v in data.y() {
        bytes.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    seeds::fingerprint(&bytes)
}

/// Repeated stratified splits of one real dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicationSpec {
    pub name: String,
    pub n_splits: usize,
    pub master_seed: u64,
    /// Where the data came from, so the manifest can reproduce the run.
    pub source: Option<IngestSpec>,
}

pub fn run_application(data: &Dataset<f64>, app: &ApplicationSpec, config: &PipelineConfig, opts: &RunOptions<'_>) -> Result<RunOutcome> {
    config.validate()?;
    data.require_both_classes()?;
    if app.n_splits == 0 {
        return Err(Error::InvalidInput("need at least one split".into()));
    }
    let unit = UnitInfo {
        id: app.name.clone(),
        p: data.p(),
        n: data.n(),
        ore: data.event_rate(),
        rho: None,
    };
    let spec = RunSpec::Application {
        application: app.clone(),
        data_fingerprint: data_fingerprint(data),
        pipeline: config.clone(),
    };
    let tag = seeds::fingerprint(b"application");
    execute(&[unit], &[app.n_splits], &arms_of(config, false), spec, opts, |_, r| {
        let rep_seed = seeds::derive(app.master_seed, &[tag, r as u64]);
        replicate(data, None, config, &app.name, r, rep_seed)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(n_pos: usize, n_neg: usize) -> Dataset<f64> {
        let rows: Vec<Vec<f64>> = (0..n_pos + n_neg).map(|i| vec![i as f64]).collect();
        let y: Vec<bool> = (0..n_pos + n_neg).map(|i| i % 5 == 0 && i / 5 < n_pos).collect();
        Dataset::from_rows(&rows, &y).unwrap()
    }

    #[test]
    fn split_counts() {
        let d = labelled(20, 80);
        assert_eq!(d.positives(), 20);
        let (train, test) = split_train_test(&d, 0.7, 1).unwrap();
        assert_eq!((train.positives(), train.negatives()), (14, 56));
        assert_eq!((test.positives(), test.negatives()), (6, 24));
    }

    #[test]
    fn split_is_partition_and_deterministic() {
        let d = labelled(13, 40);
        let (a, b) = split_indices(&d, 0.7, 9).unwrap();
        assert_eq!((a.clone(), b.clone()), split_indices(&d, 0.7, 9).unwrap());
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort();
        assert_eq!(all, (0..d.n()).collect::<Vec<_>>());
        assert_ne!(a, split_indices(&d, 0.7, 10).unwrap().0);
    }

    #[test]
    fn split_errors() {
        let d = labelled(1, 10);
        assert!(matches!(split_indices(&d, 0.7, 1), Err(Error::DegenerateData(_))));
        assert!(split_indices(&labelled(5, 5), 1.0, 1).is_err());
        // tiny classes keep a test member
        let (train, test) = split_train_test(&labelled(2, 10), 0.9, 3).unwrap();
        assert_eq!((train.positives(), test.positives()), (1, 1));
    }

    #[test]
    fn aggregate_statistics() {
        let rep = |i: usize, g: Option<f64>| ReplicationResult {
            scenario_id: "s".into(),
            rep_index: i,
            records: vec![ArmRecord {
                arm: Arm::Fit(Method::Lasso),
                gini: g,
                model_size: 2,
                status: if g.is_some() { RecordStatus::Ok } else { RecordStatus::InvalidTest },
                fit_ms: 1.0,
            }],
        };
        let unit = UnitInfo {
            id: "s".into(),
            p: 1,
            n: 10,
            ore: 0.5,
            rho: None,
        };
        let arms = [Arm::Fit(Method::Lasso)];
        let a = aggregate(unit.clone(), 4, &arms, &[rep(0, Some(0.2)), rep(1, None), rep(2, Some(0.4)), rep(3, Some(0.6))]);
        let s = &a.arms[0];
        assert_eq!(s.n_valid, 3);
        assert!((s.mean_gini.unwrap() - 0.4).abs() < 1e-15);
        assert!((s.sd_gini.unwrap() - 0.2).abs() < 1e-15);
        let one = aggregate(unit.clone(), 1, &arms, &[rep(0, Some(0.37))]);
        assert_eq!(one.arms[0].mean_gini, Some(0.37));
        assert_eq!(one.arms[0].sd_gini, Some(0.0));
        let none = aggregate(unit, 1, &arms, &[rep(0, None)]);
        assert_eq!(none.arms[0].mean_gini, None);
        assert_eq!(none.arms[0].n_valid, 0);
    }

    #[test]
    fn arm_and_status_names_round_trip() {
        for arm in [Arm::Oracle, Arm::Fit(Method::Mle), Arm::Fit(Method::Lasso), Arm::Fit(Method::StepMl), Arm::Fit(Method::LassoMl)] {
            assert_eq!(arm.as_str().parse::<Arm>().unwrap(), arm);
        }
        for s in [
            RecordStatus::Ok,
            RecordStatus::NotConverged,
            RecordStatus::LassoFallback,
            RecordStatus::Failed,
            RecordStatus::InvalidTest,
        ] {
            assert_eq!(s.as_str().parse::<RecordStatus>().unwrap(), s);
        }
    }

    #[test]
    fn pipeline_validation() {
        assert!(PipelineConfig::default().validate().is_ok());
        let dup = PipelineConfig {
            methods: vec![Method::Lasso, Method::Lasso],
            ..PipelineConfig::default()
        };
        assert!(dup.validate().is_err());
        let frac = PipelineConfig {
            train_frac: 1.0,
            ..PipelineConfig::default()
        };
        assert!(frac.validate().is_err());
    }
}
