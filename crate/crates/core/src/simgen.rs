//! Synthetic logistic datasets for the factorial simulation design:
//! AR(1)-type correlated Gaussian covariates with correlation (−ρ)^|i−j|,
//! a block of noise covariates followed by alternating ±0.5 signal
//! coefficients, and an intercept calibrated to a target event rate.

use std::collections::HashMap;
use std::sync::Mutex;

use ndarray::{Array1, Array2, ShapeBuilder};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cholesky;
use crate::model::{sigmoid, Dataset};
use crate::seeds::{self, stream};

/// Sample sizes, covariate counts, event rates and correlations of the full
/// factorial design.
pub const GRID_P: [usize; 3] = [10, 30, 50];
pub const GRID_N: [usize; 4] = [100, 200, 500, 1000];
pub const GRID_ORE: [f64; 2] = [0.2, 0.5];
pub const GRID_RHO: [f64; 2] = [0.5, 0.9];
pub const GRID_REPS: usize = 500;

/// One cell of the simulation design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub p: usize,
    pub n: usize,
    /// Target outcome rate.
    pub ore: f64,
    pub rho: f64,
    pub n_reps: usize,
    pub master_seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ore > 0.0 && self.ore < 1.0) {
            return Err(Error::InvalidInput(format!("ore must lie in (0, 1), got {}", self.ore)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidInput(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if self.p < 1 {
            return Err(Error::InvalidInput("p must be at least 1".into()));
        }
        if self.n < 10 {
            return Err(Error::InvalidInput(format!("n must be at least 10, got {}", self.n)));
        }
        Ok(())
    }

    /// Stable identifier, e.g. `p50_n100_ore0.5_rho0.5`.
    pub fn id(&self) -> String {
        format!("p{}_n{}_ore{}_rho{}", self.p, self.n, self.ore, self.rho)
    }

    pub fn fingerprint(&self) -> u64 {
        seeds::fingerprint(self.id().as_bytes())
    }

    pub fn p_over_n(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// Seed of replication `rep_index`.
    pub fn rep_seed(&self, rep_index: usize) -> u64 {
        seeds::derive(self.master_seed, &[self.fingerprint(), rep_index as u64])
    }
}

/// The 48 scenarios of the full factorial design.
pub fn full_grid(n_reps: usize, master_seed: u64) -> Vec<ScenarioConfig> {
    let mut out = Vec::with_capacity(48);
    for &ore in &GRID_ORE {
        for &rho in &GRID_RHO {
            for &p in &GRID_P {
                for &n in &GRID_N {
                    out.push(ScenarioConfig {
                        p,
                        n,
                        ore,
                        rho,
                        n_reps,
                        master_seed,
                    });
                }
            }
        }
    }
    out
}

/// True parameters of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSpec {
    pub alpha_true: f64,
    pub beta_true: Vec<f64>,
    pub noise_count: usize,
}

impl TruthSpec {
    /// floor(0.8·p) zero coefficients followed by +0.5, −0.5, +0.5, …
    pub fn coefficients(p: usize) -> (Vec<f64>, usize) {
        let noise = (p * 4) / 5;
        let beta = (0..p)
            .map(|j| {
                if j < noise {
                    0.0
                } else if (j - noise).is_multiple_of(2) {
                    0.5
                } else {
                    -0.5
                }
            })
            .collect();
        (beta, noise)
    }

    /// Signal pattern plus an intercept calibrated to the scenario's event rate.
    pub fn for_scenario(config: &ScenarioConfig, calibration: &Calibration) -> Result<Self> {
        config.validate()?;
        let (beta_true, noise_count) = Self::coefficients(config.p);
        let alpha_true = calibrate_intercept(&beta_true, config.rho, config.ore, calibration)?;
        Ok(Self {
            alpha_true,
            beta_true,
            noise_count,
        })
    }

    pub fn linear_predictor(&self, row: ndarray::ArrayView1<'_, f64>) -> f64 {
        self.alpha_true + row.iter().zip(&self.beta_true).map(|(x, b)| x * b).sum::<f64>()
    }
}

/// Σᵢⱼ = (−ρ)^|i−j|
pub fn correlation_matrix(p: usize, rho: f64) -> Result<Array2<f64>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidInput(format!("rho must lie in [0, 1), got {rho}")));
    }
    Ok(Array2::from_shape_fn((p, p), |(i, j)| {
        (-rho).powi(i.abs_diff(j) as i32)
    }))
}

/// `n` independent rows from N(0, Σ(p, ρ)), drawn as L·z with L the Cholesky
/// factor and z seeded standard normals. Returned column-major.
pub fn gen_covariates(n: usize, p: usize, rho: f64, seed: u64) -> Result<Array2<f64>> {
    let sigma = correlation_matrix(p, rho)?;
    let l = cholesky(&sigma).ok_or_else(|| {
        Error::Internal(format!("correlation matrix (p = {p}, rho = {rho}) is not positive definite"))
    })?;
    let mut rng = seeds::rng(seed);
    let mut x = Array2::<f64>::zeros((n, p).f());
    let mut z = vec![0.0; p];
    for i in 0..n {
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        for j in 0..p {
            let mut s = 0.0;
            for k in 0..=j {
                s += l[[j, k]] * z[k];
            }
            x[[i, j]] = s;
        }
    }
    Ok(x)
}

/// Monte Carlo settings for intercept calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub draws: usize,
    pub seed: u64,
    /// Bisection stops once the bracket is narrower than this.
    pub precision: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            draws: 200_000,
            seed: 0x5EED_CA11_B8A7_E000,
            precision: 1e-6,
        }
    }
}

/// Solves E[expit(α + xᵀβ)] = ore for α by bisection on [−20, 20], with the
/// expectation taken over a fixed seeded sample of linear predictors.
///
/// xᵀβ is drawn as zᵀ(Lᵀβ), which has the same law as drawing x = Lz first.
pub fn calibrate_intercept(beta: &[f64], rho: f64, ore: f64, calibration: &Calibration) -> Result<f64> {
    if !(ore > 0.0 && ore < 1.0) {
        return Err(Error::Calibration(format!("target rate {ore} outside (0, 1)")));
    }
    if beta.iter().all(|&b| b == 0.0) {
        return Ok((ore / (1.0 - ore)).ln());
    }
    let p = beta.len();
    let l = cholesky(&correlation_matrix(p, rho)?)
        .ok_or_else(|| Error::Calibration("correlation matrix not positive definite".into()))?;
    // w = Lᵀβ
    let w: Vec<f64> = (0..p)
        .map(|k| (k..p).map(|j| l[[j, k]] * beta[j]).sum())
        .collect();
    let seed = seeds::derive(calibration.seed, &[stream::CALIBRATION, p as u64, rho.to_bits()]);
    let mut rng = seeds::rng(seed);
    let eta: Vec<f64> = (0..calibration.draws)
        .map(|_| w.iter().map(|&wk| wk * rng.sample::<f64, _>(StandardNormal)).sum())
        .collect();
    let rate = |a: f64| eta.iter().map(|&e| sigmoid(a + e)).sum::<f64>() / eta.len() as f64;

    let (mut lo, mut hi) = (-20.0, 20.0);
    if !(rate(lo) < ore && rate(hi) > ore) {
        return Err(Error::Calibration(format!(
            "target rate {ore} not bracketed by intercepts in [-20, 20]"
        )));
    }
    while hi - lo > calibration.precision {
        let mid = 0.5 * (lo + hi);
        if rate(mid) < ore {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Calibrated intercepts keyed by (p, ρ, ore), shared by all replications.
#[derive(Debug, Default)]
pub struct CalibrationCache {
    calibration: Calibration,
    entries: Mutex<HashMap<(usize, u64, u64), TruthSpec>>,
}

impl CalibrationCache {
    pub fn new(calibration: Calibration) -> Self {
        Self {
            calibration,
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn truth(&self, config: &ScenarioConfig) -> Result<TruthSpec> {
        let key = (config.p, config.rho.to_bits(), config.ore.to_bits());
        if let Some(t) = self.entries.lock().expect("calibration cache poisoned").get(&key) {
            return Ok(t.clone());
        }
        let truth = TruthSpec::for_scenario(config, &self.calibration)?;
        self.entries
            .lock()
            .expect("calibration cache poisoned")
            .insert(key, truth.clone());
        Ok(truth)
    }
}

/// Replication `rep_index` of a scenario: covariates and Bernoulli outcomes
/// from seeds derived from (master seed, scenario, replication).
pub fn gen_dataset(config: &ScenarioConfig, truth: &TruthSpec, rep_index: usize) -> Result<Dataset<f64>> {
    config.validate()?;
    if truth.beta_true.len() != config.p {
        return Err(Error::DimensionMismatch {
            expected: config.p,
            found: truth.beta_true.len(),
        });
    }
    let rep_seed = config.rep_seed(rep_index);
    let x = gen_covariates(
        config.n,
        config.p,
        config.rho,
        seeds::derive(rep_seed, &[stream::COVARIATES]),
    )?;
    let mut rng = seeds::rng(seeds::derive(rep_seed, &[stream::OUTCOMES]));
    let y: Array1<f64> = x
        .rows()
        .into_iter()
        .map(|row| {
            let mu = sigmoid(truth.linear_predictor(row));
            if rng.random::<f64>() < mu {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Dataset::new(x, y, None)
}
