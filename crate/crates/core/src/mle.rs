//! Maximum-likelihood fitting by iteratively reweighted least squares.
//!
//! Each iteration solves the Newton system `(ZᵀWZ) δ = Zᵀ(y − μ)` on an
//! internally standardized design, halving the step while it would lower the
//! log-likelihood. Separation and singular normal equations never raise an
//! error: the best iterate is returned with `converged = false`.

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_spd_pivoted;
use crate::model::{loglik_term, sigmoid, Dataset, FittedModel, Method};
use crate::scalar::Scalar;

/// Lower bound applied to the IRLS weights μ(1 − μ).
pub const WEIGHT_FLOOR: f64 = 1e-10;

/// A fitted variance μ(1 − μ) below this marks a fitted probability as
/// numerically 0 or 1.
pub const SATURATION_VARIANCE: f64 = 1e-8;

/// Under separation the log-likelihood flattens while the coefficients keep
/// growing by roughly constant steps; a converged fit whose final step still
/// moved a standardized coefficient by more than this, and that has saturated
/// probabilities, is reported as separated. A genuine optimum converges
/// quadratically, so its final step is orders of magnitude smaller.
pub const SEPARATION_STEP: f64 = 1e-2;

const MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrlsConfig<F> {
    pub max_iter: usize,
    /// Convergence threshold on |Δℓ| / (|ℓ| + 0.1).
    pub tol: F,
    /// Divergence bound on max |coefficient| on the standardized scale.
    pub coef_bound: F,
}

impl<F: Scalar> Default for IrlsConfig<F> {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: F::lit(1e-8),
            coef_bound: F::lit(1e3),
        }
    }
}

impl<F: Scalar> IrlsConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("IRLS max_iter must be at least 1".into()));
        }
        if !(self.tol > F::zero()) || !(self.coef_bound > F::zero()) {
            return Err(Error::InvalidInput(
                "IRLS tol and coef_bound must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Why an IRLS run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MleStatus {
    Converged,
    MaxIterations,
    /// Weighted normal equations were rank deficient or too ill-conditioned.
    Singular,
    /// A coefficient crossed the divergence bound, or fitted probabilities
    /// saturated at 0 or 1.
    Separation,
    /// No step, however short, increased the log-likelihood.
    NoProgress,
}

#[derive(Debug, Clone)]
pub struct MleFit<F: Scalar> {
    pub model: FittedModel<F>,
    pub status: MleStatus,
    pub iterations: usize,
    pub log_likelihood: F,
    /// Log-likelihood at the start and after every accepted step.
    pub trace: Vec<F>,
}

/// Maximum-likelihood fit restricted to `columns`; the remaining coefficients are exactly 0.
/// An empty column set gives the intercept-only model.
pub fn fit_mle<F: Scalar>(data: &Dataset<F>, columns: &[usize], config: &IrlsConfig<F>) -> Result<FittedModel<F>> {
    Ok(fit_mle_detailed(data, columns, config, None)?.model)
}

/// As [`fit_mle`], optionally warm-started from `start` (original scale) and
/// reporting the stopping reason and log-likelihood trace.
pub fn fit_mle_detailed<F: Scalar>(
    data: &Dataset<F>,
    columns: &[usize],
    config: &IrlsConfig<F>,
    start: Option<&FittedModel<F>>,
) -> Result<MleFit<F>> {
    config.validate()?;
    let p = data.p();
    let mut cols = columns.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if let Some(&bad) = cols.iter().find(|&&j| j >= p) {
        return Err(Error::InvalidInput(format!(
            "column index {bad} out of range for p = {p}"
        )));
    }
    if let Some(s) = start {
        if s.p() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: s.p(),
            });
        }
    }

    let design = Design::new(data, &cols);
    let k = cols.len();
    let m = k + 1;
    let y = data.y().as_slice().expect("contiguous outcomes");

    // θ = (a, b) on the standardized scale
    let mut theta = vec![F::zero(); m];
    match start {
        Some(s) => {
            let mut a = s.alpha;
            for (c, &j) in cols.iter().enumerate() {
                theta[c + 1] = s.beta[j] * design.scale[c];
                a += s.beta[j] * design.center[c];
            }
            theta[0] = a;
        }
        None => {
            let ybar = data.event_rate();
            if ybar > F::zero() && ybar < F::one() {
                theta[0] = (ybar / (F::one() - ybar)).ln();
            }
        }
    }

    let floor = F::lit(WEIGHT_FLOOR);
    let slack = F::epsilon() * F::lit(8.0);
    let mut eta = design.eta(&theta);
    let mut ll = loglik(y, &eta);
    let mut trace = vec![ll];
    let mut status = MleStatus::MaxIterations;
    let mut iterations = 0;
    let mut last_step = F::zero();

    let mut w = vec![F::zero(); data.n()];
    let mut resid = vec![F::zero(); data.n()];
    let mut hess = vec![F::zero(); m * m];
    let mut grad = vec![F::zero(); m];

    for _ in 0..config.max_iter {
        for i in 0..data.n() {
            let mu = sigmoid(eta[i]);
            w[i] = (mu * (F::one() - mu)).max(floor);
            resid[i] = y[i] - mu;
        }
        design.normal_equations(&w, &resid, &mut hess, &mut grad);
        let delta = match solve_spd_pivoted(&hess, m, &grad) {
            Ok(d) => d,
            Err(_) => {
                status = MleStatus::Singular;
                break;
            }
        };

        let mut step = F::one();
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand: Vec<F> = theta.iter().zip(&delta).map(|(&t, &d)| t + step * d).collect();
            let cand_eta = design.eta(&cand);
            let cand_ll = loglik(y, &cand_eta);
            if cand_ll.is_finite() && cand_ll >= ll - slack * (ll.abs() + F::one()) {
                accepted = Some((cand, cand_eta, cand_ll));
                break;
            }
            step *= F::lit(0.5);
        }
        let Some((cand, cand_eta, cand_ll)) = accepted else {
            status = MleStatus::NoProgress;
            break;
        };
        iterations += 1;
        last_step = delta.iter().fold(F::zero(), |acc, &d| acc.max((step * d).abs()));
        let rel_change = (cand_ll - ll).abs() / (cand_ll.abs() + F::lit(0.1));
        theta = cand;
        eta = cand_eta;
        ll = cand_ll;
        trace.push(ll);

        let max_coef = theta[1..].iter().fold(F::zero(), |acc, &v| acc.max(v.abs()));
        if !(max_coef <= config.coef_bound) {
            status = MleStatus::Separation;
            break;
        }
        if rel_change < config.tol {
            status = MleStatus::Converged;
            break;
        }
    }

    if status == MleStatus::Converged && last_step > F::lit(SEPARATION_STEP) {
        let sat = F::lit(SATURATION_VARIANCE);
        if eta.iter().any(|&e| {
            let mu = sigmoid(e);
            mu * (F::one() - mu) < sat
        }) {
            status = MleStatus::Separation;
        }
    }

    // back to the original covariate scale
    let mut beta = Array1::zeros(p);
    let mut alpha = theta[0];
    for (c, &j) in cols.iter().enumerate() {
        let bj = theta[c + 1] / design.scale[c];
        beta[j] = bj;
        alpha -= bj * design.center[c];
    }
    let model = FittedModel {
        alpha,
        beta,
        method: Method::Mle,
        converged: status == MleStatus::Converged,
        support: cols,
        lambda: None,
        lasso_fallback: false,
    };
    Ok(MleFit {
        model,
        status,
        iterations,
        log_likelihood: ll,
        trace,
    })
}

/// Intercept column followed by centered and scaled copies of the selected
/// columns, stored row-major for the matrix products.
struct Design<F> {
    z: Array2<F>,
    center: Vec<F>,
    scale: Vec<F>,
}

impl<F: Scalar> Design<F> {
    fn new(data: &Dataset<F>, cols: &[usize]) -> Self {
        let n = data.n();
        let nf = F::lit(n as f64);
        let mut z = Array2::<F>::ones((n, cols.len() + 1));
        let mut center = Vec::with_capacity(cols.len());
        let mut scale = Vec::with_capacity(cols.len());
        for (c, &j) in cols.iter().enumerate() {
            let x = data.column(j);
            let mean = x.iter().copied().sum::<F>() / nf;
            let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>() / nf;
            // a constant column stays constant (zero after centering) and
            // makes the normal equations singular, which is reported
            let sd = if var > F::zero() { var.sqrt() } else { F::one() };
            for (zi, &v) in z.column_mut(c + 1).iter_mut().zip(x) {
                *zi = (v - mean) / sd;
            }
            center.push(mean);
            scale.push(sd);
        }
        Self { z, center, scale }
    }

    fn eta(&self, theta: &[F]) -> Vec<F> {
        self.z.dot(&ArrayView1::from(theta)).to_vec()
    }

    /// Row-major ZᵀWZ into `hess` and Zᵀr into `grad`.
    fn normal_equations(&self, w: &[F], resid: &[F], hess: &mut [F], grad: &mut [F]) {
        let mut zw = self.z.clone();
        for (mut row, &wi) in zw.rows_mut().into_iter().zip(w) {
            let s = wi.sqrt();
            row.mapv_inplace(|v| v * s);
        }
        let h = zw.t().dot(&zw);
        for (dst, &v) in hess.iter_mut().zip(h.iter()) {
            *dst = v;
        }
        let g = self.z.t().dot(&ArrayView1::from(resid));
        grad.copy_from_slice(g.as_slice().expect("contiguous"));
    }
}

fn loglik<F: Scalar>(y: &[F], eta: &[F]) -> F {
    y.iter().zip(eta).map(|(&yi, &e)| loglik_term(yi, e)).sum()
}
