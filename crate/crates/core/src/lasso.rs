//! L1-penalized logistic regression over a warm-started λ path.
//!
//! Covariates are standardized to zero mean and unit (population) variance,
//! and the solver minimizes
//!
//! ```text
//! −ℓ(a, b) / n + λ Σⱼ |bⱼ|
//! ```
//!
//! on that scale, i.e. λ is per observation. Each λ is solved by a proximal
//! Newton scheme: an outer loop refreshes the IRLS quadratic approximation and
//! an inner loop runs cyclic coordinate descent on it, restricted to the
//! active set once the first full sweep is done. The intercept is never
//! penalized. Columns with zero variance are held at zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mle::WEIGHT_FLOOR;
use crate::model::{loglik_term, sigmoid, Dataset, FittedModel, Method};
use crate::scalar::Scalar;

/// sign(z) · max(|z| − γ, 0)
#[inline]
pub fn soft_threshold<F: Scalar>(z: F, gamma: F) -> F {
    debug_assert!(gamma >= F::zero());
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        F::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig<F> {
    pub n_lambda: usize,
    /// Smallest λ as a fraction of λ_max; `None` picks 0.01 when n > p and 0.05 otherwise.
    pub lambda_min_ratio: Option<F>,
    /// Quadratic-approximation refreshes per λ.
    pub max_outer: usize,
    /// Inner coordinate descent stops when no coefficient moves by more than this.
    pub inner_tol: F,
    /// A λ is solved when an outer step moves no parameter by more than this.
    pub outer_tol: F,
    /// Cap on coordinate sweeps per outer iteration.
    pub max_sweeps: usize,
}

impl<F: Scalar> Default for PathConfig<F> {
    fn default() -> Self {
        Self {
            n_lambda: 100,
            lambda_min_ratio: None,
            max_outer: 25,
            inner_tol: F::lit(1e-7),
            outer_tol: F::lit(1e-6),
            max_sweeps: 10_000,
        }
    }
}

impl<F: Scalar> PathConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.n_lambda < 2 {
            return Err(Error::InvalidInput("n_lambda must be at least 2".into()));
        }
        if let Some(r) = self.lambda_min_ratio {
            if !(r > F::zero() && r < F::one()) {
                return Err(Error::InvalidInput(format!(
                    "lambda_min_ratio must lie in (0, 1), got {r}"
                )));
            }
        }
        if self.max_outer == 0 || self.max_sweeps == 0 {
            return Err(Error::InvalidInput("solver iteration caps must be positive".into()));
        }
        if !(self.inner_tol > F::zero()) || !(self.outer_tol > F::zero()) {
            return Err(Error::InvalidInput("solver tolerances must be positive".into()));
        }
        Ok(())
    }

    /// The configured ratio, or the default for an `n × p` training set.
    pub fn min_ratio_for(&self, n: usize, p: usize) -> F {
        self.lambda_min_ratio
            .unwrap_or_else(|| if n > p { F::lit(0.01) } else { F::lit(0.05) })
    }
}

/// Column means and standard deviations used to standardize the covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization<F> {
    pub means: Vec<F>,
    pub sds: Vec<F>,
}

impl<F: Scalar> Standardization<F> {
    pub fn fit(data: &Dataset<F>) -> Self {
        let nf = F::lit(data.n() as f64);
        let mut means = Vec::with_capacity(data.p());
        let mut sds = Vec::with_capacity(data.p());
        for j in 0..data.p() {
            let x = data.column(j);
            let mean = x.iter().copied().sum::<F>() / nf;
            let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>() / nf;
            means.push(mean);
            sds.push(var.sqrt());
        }
        Self { means, sds }
    }

    /// Whether column `j` is penalized (has nonzero variance).
    pub fn is_active(&self, j: usize) -> bool {
        self.sds[j] > F::zero()
    }

    /// Maps standardized-scale parameters back to the original covariates.
    pub fn to_original(&self, intercept: F, coefs: &[F]) -> (F, Vec<F>) {
        let mut alpha = intercept;
        let beta = coefs
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                if b == F::zero() {
                    F::zero()
                } else {
                    let bj = b / self.sds[j];
                    alpha -= bj * self.means[j];
                    bj
                }
            })
            .collect();
        (alpha, beta)
    }
}

/// Standardized covariates and outcomes; the working problem for the solver.
#[derive(Debug, Clone)]
pub struct StandardizedDesign<F> {
    cols: Vec<Vec<F>>,
    y: Vec<F>,
    pub standardization: Standardization<F>,
}

impl<F: Scalar> StandardizedDesign<F> {
    pub fn new(data: &Dataset<F>) -> Self {
        let standardization = Standardization::fit(data);
        let cols = (0..data.p())
            .map(|j| {
                let (m, s) = (standardization.means[j], standardization.sds[j]);
                if s > F::zero() {
                    data.column(j).iter().map(|&v| (v - m) / s).collect()
                } else {
                    vec![F::zero(); data.n()]
                }
            })
            .collect();
        Self {
            cols,
            y: data.y().to_vec(),
            standardization,
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[F] {
        &self.cols[j]
    }

    pub fn eta(&self, intercept: F, coefs: &[F]) -> Vec<F> {
        let mut eta = vec![intercept; self.n()];
        for (col, &b) in self.cols.iter().zip(coefs) {
            if b == F::zero() {
                continue;
            }
            for (e, &x) in eta.iter_mut().zip(col) {
                *e += b * x;
            }
        }
        eta
    }

    /// −ℓ / n + λ ‖b‖₁ on the standardized scale.
    pub fn objective(&self, intercept: F, coefs: &[F], lambda: F) -> F {
        let eta = self.eta(intercept, coefs);
        self.objective_from_eta(&eta, coefs, lambda)
    }

    fn objective_from_eta(&self, eta: &[F], coefs: &[F], lambda: F) -> F {
        let nf = F::lit(self.n() as f64);
        let ll: F = self.y.iter().zip(eta).map(|(&y, &e)| loglik_term(y, e)).sum();
        let l1: F = coefs.iter().map(|b| b.abs()).sum();
        -ll / nf + lambda * l1
    }

    /// Per-observation score (1/n) Σᵢ x̃ᵢⱼ (yᵢ − μᵢ) for every column, intercept first.
    pub fn score(&self, intercept: F, coefs: &[F]) -> Vec<F> {
        let nf = F::lit(self.n() as f64);
        let eta = self.eta(intercept, coefs);
        let resid: Vec<F> = self.y.iter().zip(&eta).map(|(&y, &e)| y - sigmoid(e)).collect();
        let mut out = Vec::with_capacity(self.p() + 1);
        out.push(resid.iter().copied().sum::<F>() / nf);
        for col in &self.cols {
            out.push(col.iter().zip(&resid).map(|(&x, &r)| x * r).sum::<F>() / nf);
        }
        out
    }

    /// Largest KKT violation of the penalized problem at (intercept, coefs).
    pub fn kkt_violation(&self, intercept: F, coefs: &[F], lambda: F) -> F {
        let score = self.score(intercept, coefs);
        let mut worst = score[0].abs();
        for (j, &b) in coefs.iter().enumerate() {
            if !self.standardization.is_active(j) {
                continue;
            }
            let g = score[j + 1];
            let v = if b == F::zero() {
                (g.abs() - lambda).max(F::zero())
            } else {
                (g - lambda * b.signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    fn lambda_max(&self) -> F {
        let nf = F::lit(self.n() as f64);
        let ybar = self.y.iter().copied().sum::<F>() / nf;
        self.cols
            .iter()
            .map(|col| {
                (col.iter().zip(&self.y).map(|(&x, &y)| x * (y - ybar)).sum::<F>() / nf).abs()
            })
            .fold(F::zero(), F::max)
    }

    fn null_intercept(&self) -> F {
        let nf = F::lit(self.n() as f64);
        let ybar = self.y.iter().copied().sum::<F>() / nf;
        (ybar / (F::one() - ybar)).ln()
    }
}

/// Smallest λ at which every penalized coefficient is zero:
/// maxⱼ |Σᵢ x̃ᵢⱼ (yᵢ − ȳ)| / n over standardized columns.
pub fn lambda_max<F: Scalar>(data: &Dataset<F>) -> Result<F> {
    data.require_both_classes()?;
    let lmax = StandardizedDesign::new(data).lambda_max();
    if !(lmax > F::zero()) {
        return Err(Error::DegenerateData(
            "no covariate is associated with the outcome (lambda_max = 0)".into(),
        ));
    }
    Ok(lmax)
}

/// `n_lambda` log-spaced values from `lambda_max` down to `lambda_max · min_ratio`.
pub fn lambda_grid<F: Scalar>(lambda_max: F, n_lambda: usize, min_ratio: F) -> Vec<F> {
    let denom = F::lit((n_lambda - 1) as f64);
    (0..n_lambda)
        .map(|k| {
            if k == 0 {
                lambda_max
            } else {
                lambda_max * (min_ratio.ln() * F::lit(k as f64) / denom).exp()
            }
        })
        .collect()
}

/// Solution at one λ on the standardized scale.
#[derive(Debug, Clone, PartialEq)]
pub struct StdSolution<F> {
    pub intercept: F,
    pub coefs: Vec<F>,
    pub converged: bool,
    /// Penalized objective at the warm start and after every outer step.
    pub objective_trace: Vec<F>,
}

#[derive(Debug, Clone)]
pub struct LambdaPath<F: Scalar> {
    pub lambdas: Vec<F>,
    /// Per-λ models on the original covariate scale.
    pub solutions: Vec<FittedModel<F>>,
    pub standardized: Vec<StdSolution<F>>,
    pub standardization: Standardization<F>,
}

impl<F: Scalar> LambdaPath<F> {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn model(&self, idx: usize) -> &FittedModel<F> {
        &self.solutions[idx]
    }
}

/// Fits the path on the default log-spaced grid anchored at this dataset's λ_max.
pub fn fit_lasso_path<F: Scalar>(data: &Dataset<F>, config: &PathConfig<F>) -> Result<LambdaPath<F>> {
    config.validate()?;
    let lmax = lambda_max(data)?;
    let grid = lambda_grid(lmax, config.n_lambda, config.min_ratio_for(data.n(), data.p()));
    fit_lasso_path_on_grid(data, &grid, config)
}

/// Fits the path on a caller-supplied strictly decreasing grid, warm-starting
/// each λ from the previous solution.
pub fn fit_lasso_path_on_grid<F: Scalar>(data: &Dataset<F>, grid: &[F], config: &PathConfig<F>) -> Result<LambdaPath<F>> {
    config.validate()?;
    data.require_both_classes()?;
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty lambda grid".into()));
    }
    if grid.iter().any(|&l| !(l > F::zero()) || !l.is_finite())
        || grid.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::InvalidInput(
            "lambda grid must be positive and strictly decreasing".into(),
        ));
    }

    let design = StandardizedDesign::new(data);
    let own_max = design.lambda_max();
    let null_intercept = design.null_intercept();
    let mut solver = Solver::new(&design, config);
    let mut intercept = null_intercept;
    let mut coefs = vec![F::zero(); data.p()];

    let mut standardized = Vec::with_capacity(grid.len());
    let mut solutions = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let sol = if lambda >= own_max {
            intercept = null_intercept;
            coefs.iter_mut().for_each(|b| *b = F::zero());
            let obj = design.objective(intercept, &coefs, lambda);
            StdSolution {
                intercept,
                coefs: coefs.clone(),
                converged: true,
                objective_trace: vec![obj],
            }
        } else {
            let (converged, trace) = solver.solve(lambda, &mut intercept, &mut coefs);
            StdSolution {
                intercept,
                coefs: coefs.clone(),
                converged,
                objective_trace: trace,
            }
        };
        let (alpha, beta) = design.standardization.to_original(sol.intercept, &sol.coefs);
        let support = sol
            .coefs
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != F::zero())
            .map(|(j, _)| j)
            .collect();
        solutions.push(FittedModel {
            alpha,
            beta: beta.into(),
            method: Method::Lasso,
            converged: sol.converged,
            support,
            lambda: Some(lambda),
            lasso_fallback: false,
        });
        standardized.push(sol);
    }
    Ok(LambdaPath {
        lambdas: grid.to_vec(),
        solutions,
        standardized,
        standardization: design.standardization.clone(),
    })
}

/// Scratch state for the proximal Newton iterations.
struct Solver<'a, F> {
    design: &'a StandardizedDesign<F>,
    config: &'a PathConfig<F>,
    active: Vec<usize>,
    w: Vec<F>,
    s: Vec<F>,
    v: Vec<F>,
}

impl<'a, F: Scalar> Solver<'a, F> {
    fn new(design: &'a StandardizedDesign<F>, config: &'a PathConfig<F>) -> Self {
        let n = design.n();
        Self {
            active: (0..design.p())
                .filter(|&j| design.standardization.is_active(j))
                .collect(),
            design,
            config,
            w: vec![F::zero(); n],
            s: vec![F::zero(); n],
            v: vec![F::zero(); design.p()],
        }
    }

    /// Solves at `lambda` starting from (intercept, coefs), updating them in place.
    fn solve(&mut self, lambda: F, intercept: &mut F, coefs: &mut [F]) -> (bool, Vec<F>) {
        let design = self.design;
        let n = design.n();
        let nf = F::lit(n as f64);
        let floor = F::lit(WEIGHT_FLOOR);
        let slack = F::epsilon() * F::lit(8.0);

        let mut eta = design.eta(*intercept, coefs);
        let mut obj = design.objective_from_eta(&eta, coefs, lambda);
        let mut trace = vec![obj];

        for _ in 0..self.config.max_outer {
            for (i, &e) in eta.iter().enumerate() {
                let mu = sigmoid(e);
                self.w[i] = (mu * (F::one() - mu)).max(floor);
                // s holds w·(working residual) for the quadratic model
                self.s[i] = design.y[i] - mu;
            }
            for &j in &self.active {
                self.v[j] = design.cols[j]
                    .iter()
                    .zip(&self.w)
                    .map(|(&x, &w)| w * x * x)
                    .sum::<F>()
                    / nf;
            }

            let old_intercept = *intercept;
            let old_coefs = coefs.to_vec();
            let mut new_intercept = *intercept;
            let mut new_coefs = coefs.to_vec();
            self.coordinate_descent(lambda, &mut new_intercept, &mut new_coefs);

            // backtrack on the true objective if the quadratic model overshot
            let half = F::lit(0.5);
            let mut cand_eta = design.eta(new_intercept, &new_coefs);
            let mut cand_obj = design.objective_from_eta(&cand_eta, &new_coefs, lambda);
            let mut halvings = 0;
            while !(cand_obj <= obj + slack * (obj.abs() + F::one())) && halvings < 10 {
                new_intercept = old_intercept + (new_intercept - old_intercept) * half;
                for (b, &o) in new_coefs.iter_mut().zip(&old_coefs) {
                    *b = o + (*b - o) * half;
                }
                cand_eta = design.eta(new_intercept, &new_coefs);
                cand_obj = design.objective_from_eta(&cand_eta, &new_coefs, lambda);
                halvings += 1;
            }
            if !(cand_obj <= obj + slack * (obj.abs() + F::one())) {
                return (false, trace);
            }

            let mut change = (new_intercept - old_intercept).abs();
            for (&b, &o) in new_coefs.iter().zip(&old_coefs) {
                change = change.max((b - o).abs());
            }
            *intercept = new_intercept;
            coefs.copy_from_slice(&new_coefs);
            eta = cand_eta;
            obj = cand_obj;
            trace.push(obj);
            if change < self.config.outer_tol && halvings == 0 {
                return (true, trace);
            }
        }
        (false, trace)
    }

    /// Cyclic coordinate descent on the current quadratic approximation:
    /// full sweep, then sweeps over the nonzero set until they settle, then a
    /// full sweep to confirm nothing else wants to enter.
    fn coordinate_descent(&mut self, lambda: F, intercept: &mut F, coefs: &mut [F]) {
        let tol = self.config.inner_tol;
        let mut sweeps = 0;
        let all = self.active.clone();
        loop {
            let d = self.sweep(lambda, intercept, coefs, &all);
            sweeps += 1;
            if d < tol || sweeps >= self.config.max_sweeps {
                return;
            }
            let nonzero: Vec<usize> = all.iter().copied().filter(|&j| coefs[j] != F::zero()).collect();
            loop {
                let d = self.sweep(lambda, intercept, coefs, &nonzero);
                sweeps += 1;
                if d < tol || sweeps >= self.config.max_sweeps {
                    break;
                }
            }
        }
    }

    fn sweep(&mut self, lambda: F, intercept: &mut F, coefs: &mut [F], set: &[usize]) -> F {
        let cols = &self.design.cols;
        let nf = F::lit(self.design.n() as f64);
        let sw: F = self.w.iter().copied().sum();
        let da = self.s.iter().copied().sum::<F>() / sw;
        let mut max_change = da.abs();
        if da != F::zero() {
            *intercept += da;
            for (s, &w) in self.s.iter_mut().zip(&self.w) {
                *s -= w * da;
            }
        }
        for &j in set {
            let col = &cols[j];
            let vj = self.v[j];
            let old = coefs[j];
            let z = col.iter().zip(&self.s).map(|(&x, &s)| x * s).sum::<F>() / nf + vj * old;
            let new = soft_threshold(z, lambda) / vj;
            let d = new - old;
            if d != F::zero() {
                coefs[j] = new;
                for ((s, &w), &x) in self.s.iter_mut().zip(&self.w).zip(col) {
                    *s -= w * x * d;
                }
                max_change = max_change.max(d.abs());
            }
        }
        max_change
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn synthetic(n: usize, p: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let y: Vec<bool> = rows
            .iter()
            .map(|r| {
                let eta = 0.2 + 1.5 * r[0] - 1.0 * r[p - 1];
                rng.random::<f64>() < sigmoid(eta)
            })
            .collect();
        Dataset::from_rows(&rows, &y).unwrap()
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-1.0, 1.0), 0.0);
        assert_eq!(soft_threshold(2.5f32, 0.0), 2.5);
    }

    #[test]
    fn lambda_max_hand_computation() {
        // two orthogonal ±1 columns, already standardized
        let rows = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        let d = Dataset::from_rows(&rows, &[true, true, false, true]).unwrap();
        // ȳ = 0.75; scores: col0 = (0.25+0.25+0.75-0.25)/4 = 0.25, col1 = (0.25-0.25-0.75-0.25)/4 = -0.25
        let lmax: f64 = lambda_max(&d).unwrap();
        assert!((lmax - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lambda_max_scale_invariant() {
        let d = synthetic(80, 3, 5);
        let mut x = d.x().clone();
        x.column_mut(1).mapv_inplace(|v| v * 10.0);
        let scaled = Dataset::new(x, d.y().clone(), None).unwrap();
        let a = lambda_max(&d).unwrap();
        let b = lambda_max(&scaled).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn single_class_is_degenerate() {
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0]], &[true, true]).unwrap();
        assert!(matches!(lambda_max(&d), Err(Error::DegenerateData(_))));
        assert!(fit_lasso_path(&d, &PathConfig::default()).is_err());
    }

    #[test]
    fn first_point_is_null_model() {
        let d = synthetic(120, 4, 11);
        let path = fit_lasso_path(&d, &PathConfig::default()).unwrap();
        let first = path.model(0);
        assert!(first.beta.iter().all(|&b| b == 0.0));
        let ybar = d.event_rate();
        assert!((first.alpha - (ybar / (1.0 - ybar)).ln()).abs() < 1e-12);
        assert_eq!(path.len(), 100);
        assert!(path.lambdas.windows(2).all(|w| w[1] < w[0]));
        let ratio = path.lambdas[99] / path.lambdas[0];
        assert!((ratio - 0.01).abs() < 1e-12);
    }

    #[test]
    fn grid_default_ratio_depends_on_shape() {
        let cfg = PathConfig::<f64>::default();
        assert_eq!(cfg.min_ratio_for(100, 10), 0.01);
        assert_eq!(cfg.min_ratio_for(10, 10), 0.05);
    }

    #[test]
    fn kkt_holds_and_objective_decreases() {
        let d = synthetic(150, 6, 3);
        let path = fit_lasso_path(&d, &PathConfig::default()).unwrap();
        let design = StandardizedDesign::new(&d);
        for (lambda, sol) in path.lambdas.iter().zip(&path.standardized) {
            assert!(sol.converged);
            let v = design.kkt_violation(sol.intercept, &sol.coefs, *lambda);
            assert!(v <= 1e-5, "kkt violation {v} at lambda {lambda}");
            for w in sol.objective_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-14);
            }
        }
    }

    #[test]
    fn back_transform_preserves_predictions() {
        let d = synthetic(90, 5, 21);
        let path = fit_lasso_path(&d, &PathConfig::default()).unwrap();
        let design = StandardizedDesign::new(&d);
        for idx in [10, 50, 99] {
            let sol = &path.standardized[idx];
            let eta_std = design.eta(sol.intercept, &sol.coefs);
            let eta_orig = path.model(idx).linear_predictors(&d).unwrap();
            for (a, b) in eta_std.iter().zip(eta_orig.iter()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_variance_column_stays_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..60).map(|_| vec![rng.random::<f64>(), 4.0]).collect();
        let y: Vec<bool> = rows.iter().map(|r| r[0] > 0.4).collect();
        let d = Dataset::from_rows(&rows, &y).unwrap();
        let path = fit_lasso_path(&d, &PathConfig::default()).unwrap();
        assert!(path.solutions.iter().all(|m| m.beta[1] == 0.0));
        assert!(path.solutions.last().unwrap().beta[0] > 0.0);
    }

    #[test]
    fn grid_validation() {
        let d = synthetic(40, 2, 1);
        let cfg = PathConfig::default();
        assert!(fit_lasso_path_on_grid(&d, &[0.1, 0.2], &cfg).is_err());
        assert!(fit_lasso_path_on_grid(&d, &[0.1, 0.0], &cfg).is_err());
        assert!(fit_lasso_path_on_grid(&d, &[], &cfg).is_err());
        let bad = PathConfig {
            n_lambda: 1,
            ..PathConfig::default()
        };
        assert!(fit_lasso_path(&d, &bad).is_err());
        let bad = PathConfig {
            lambda_min_ratio: Some(1.5),
            ..PathConfig::default()
        };
        assert!(fit_lasso_path(&d, &bad).is_err());
    }

    #[test]
    fn works_in_f32() {
        let d = synthetic(100, 3, 2);
        let x32 = d.x().mapv(|v| v as f32);
        let y32 = d.y().mapv(|v| v as f32);
        let d32 = Dataset::new(x32, y32, None).unwrap();
        let cfg = PathConfig::<f32> {
            inner_tol: 1e-5,
            outer_tol: 1e-4,
            n_lambda: 20,
            ..PathConfig::default()
        };
        let path = fit_lasso_path(&d32, &cfg).unwrap();
        let last = path.model(19);
        assert!(last.beta[0] > 0.5);
    }
}
