//! The logistic model: data container, fitted parameters, probabilities,
//! log-likelihood and its gradient.

use std::fmt;

use ndarray::{Array1, Array2, ArrayView1, ShapeBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Covariate matrix and binary outcomes.
///
/// Covariates are stored column-major so that per-column sweeps (coordinate
/// descent, standardization) touch contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F: Scalar> {
    x: Array2<F>,
    y: Array1<F>,
    feature_names: Option<Vec<String>>,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(x: Array2<F>, y: Array1<F>, feature_names: Option<Vec<String>>) -> Result<Self> {
        let (n, p) = x.dim();
        if n == 0 || p == 0 {
            return Err(Error::InvalidInput(format!(
                "dataset needs at least one row and one column, got {n}x{p}"
            )));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        if let Some(bad) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite covariate at row {}, column {}",
                bad / p,
                bad % p
            )));
        }
        if let Some(i) = y.iter().position(|&v| v != F::zero() && v != F::one()) {
            return Err(Error::InvalidInput(format!(
                "outcome at row {i} is {}, expected 0 or 1",
                y[i]
            )));
        }
        if let Some(names) = &feature_names {
            if names.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    found: names.len(),
                });
            }
        }
        let x = if x.t().is_standard_layout() {
            x
        } else {
            let mut col_major = Array2::<F>::zeros((n, p).f());
            col_major.assign(&x);
            col_major
        };
        Ok(Self { x, y, feature_names })
    }

    /// Builds a dataset from row vectors and boolean outcomes.
    pub fn from_rows(rows: &[Vec<F>], y: &[bool]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: r.len(),
            });
        }
        let mut x = Array2::<F>::zeros((n, p).f());
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                x[[i, j]] = v;
            }
        }
        let y = y.iter().map(|&b| if b { F::one() } else { F::zero() }).collect();
        Self::new(x, y, None)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &Array2<F> {
        &self.x
    }

    pub fn y(&self) -> &Array1<F> {
        &self.y
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Name of column `j`, falling back to `x{j+1}`.
    pub fn feature_name(&self, j: usize) -> String {
        self.feature_names
            .as_ref()
            .map_or_else(|| format!("x{}", j + 1), |names| names[j].clone())
    }

    /// Contiguous view of column `j`.
    pub fn column(&self, j: usize) -> &[F] {
        self.x
            .column(j)
            .to_slice()
            .expect("covariates are stored column-major")
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, F> {
        self.x.row(i)
    }

    pub fn label(&self, i: usize) -> bool {
        self.y[i] == F::one()
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&v| v == F::one()).count()
    }

    pub fn negatives(&self) -> usize {
        self.n() - self.positives()
    }

    /// Sample event rate, ȳ.
    pub fn event_rate(&self) -> F {
        F::lit(self.positives() as f64 / self.n() as f64)
    }

    pub fn has_both_classes(&self) -> bool {
        let k = self.positives();
        k > 0 && k < self.n()
    }

    /// Row indices of each class, in row order: `(negatives, positives)`.
    pub fn class_indices(&self) -> (Vec<usize>, Vec<usize>) {
        (0..self.n()).partition(|&i| !self.label(i))
    }

    /// New dataset made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let p = self.p();
        let mut x = Array2::<F>::zeros((rows.len(), p).f());
        for j in 0..p {
            let src = self.column(j);
            let mut dst = x.column_mut(j);
            for (k, &i) in rows.iter().enumerate() {
                dst[k] = src[i];
            }
        }
        let y = rows.iter().map(|&i| self.y[i]).collect();
        Self::new(x, y, self.feature_names.clone())
    }

    pub(crate) fn require_both_classes(&self) -> Result<()> {
        if self.has_both_classes() {
            Ok(())
        } else {
            Err(Error::DegenerateData(format!(
                "outcome has a single class ({} positives out of {})",
                self.positives(),
                self.n()
            )))
        }
    }
}

/// Which pipeline produced a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Mle,
    Lasso,
    StepMl,
    LassoMl,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mle => "MLE",
            Method::Lasso => "Lasso",
            Method::StepMl => "StepML",
            Method::LassoMl => "LassoML",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Intercept and coefficients of a fitted logistic model, on the original
/// covariate scale.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel<F: Scalar> {
    pub alpha: F,
    pub beta: Array1<F>,
    pub method: Method,
    pub converged: bool,
    /// Selected columns, ascending.
    pub support: Vec<usize>,
    /// Penalty the coefficients were taken at, for lasso-derived models.
    pub lambda: Option<F>,
    /// Set on a LassoML model whose maximum-likelihood refit failed and which
    /// therefore carries the lasso coefficients.
    pub lasso_fallback: bool,
}

impl<F: Scalar> FittedModel<F> {
    /// Model with every coefficient zero.
    pub fn intercept_only(alpha: F, p: usize, method: Method, converged: bool) -> Self {
        Self {
            alpha,
            beta: Array1::zeros(p),
            method,
            converged,
            support: Vec::new(),
            lambda: None,
            lasso_fallback: false,
        }
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    /// Support recomputed as the nonzero set of `beta`.
    pub fn nonzero_support(&self) -> Vec<usize> {
        self.beta
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != F::zero())
            .map(|(j, _)| j)
            .collect()
    }

    /// α + xᵀβ
    pub fn linear_predictor(&self, x_row: ArrayView1<'_, F>) -> F {
        self.alpha + x_row.dot(&self.beta)
    }

    /// Linear predictor for every row of `data`.
    pub fn linear_predictors(&self, data: &Dataset<F>) -> Result<Array1<F>> {
        check_dims(self, data)?;
        Ok(linear_predictors(data, self.alpha, &self.beta))
    }

    /// Fitted probabilities for every row of `data`.
    pub fn predict_proba(&self, data: &Dataset<F>) -> Result<Array1<F>> {
        Ok(self.linear_predictors(data)?.mapv(probability))
    }
}

/// Inverse logit, evaluated without overflow for any finite η.
#[inline]
pub fn sigmoid<F: Scalar>(eta: F) -> F {
    if eta >= F::zero() {
        F::one() / (F::one() + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (F::one() + e)
    }
}

/// Reported success probability: the inverse logit kept inside
/// [ε, 1 − ε] (machine ε) so it lies strictly in (0, 1) and is symmetric,
/// μ(η) + μ(−η) = 1. Beyond |η| ≈ 36 all predictions tie at the bounds.
#[inline]
pub fn probability<F: Scalar>(eta: F) -> F {
    let eps = F::epsilon();
    sigmoid(eta).max(eps).min(F::one() - eps)
}

/// log(1 + e^η), stable for large |η|.
#[inline]
pub fn log1p_exp<F: Scalar>(eta: F) -> F {
    if eta > F::zero() {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

/// Bernoulli log-likelihood contribution, y·η − log(1 + e^η).
#[inline]
pub(crate) fn loglik_term<F: Scalar>(y: F, eta: F) -> F {
    y * eta - log1p_exp(eta)
}

/// α + Xβ, skipping zero coefficients.
pub(crate) fn linear_predictors<F: Scalar>(data: &Dataset<F>, alpha: F, beta: &Array1<F>) -> Array1<F> {
    let mut eta = Array1::from_elem(data.n(), alpha);
    for (j, &b) in beta.iter().enumerate() {
        if b == F::zero() {
            continue;
        }
        for (e, &x) in eta.iter_mut().zip(data.column(j)) {
            *e += b * x;
        }
    }
    eta
}

fn check_dims<F: Scalar>(model: &FittedModel<F>, data: &Dataset<F>) -> Result<()> {
    if model.p() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: data.p(),
            found: model.p(),
        });
    }
    Ok(())
}

/// Success probability for one covariate row.
pub fn predict_mu<F: Scalar>(model: &FittedModel<F>, x_row: ArrayView1<'_, F>) -> Result<F> {
    if x_row.len() != model.p() {
        return Err(Error::DimensionMismatch {
            expected: model.p(),
            found: x_row.len(),
        });
    }
    if x_row.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite covariate value".into()));
    }
    let eta = model.linear_predictor(x_row);
    if !eta.is_finite() {
        return Err(Error::InvalidInput("non-finite linear predictor".into()));
    }
    Ok(probability(eta))
}

/// Σ [yᵢ log μᵢ + (1 − yᵢ) log(1 − μᵢ)], computed on the η scale.
pub fn log_likelihood<F: Scalar>(model: &FittedModel<F>, data: &Dataset<F>) -> Result<F> {
    check_dims(model, data)?;
    let eta = linear_predictors(data, model.alpha, &model.beta);
    Ok(eta
        .iter()
        .zip(data.y())
        .map(|(&e, &y)| loglik_term(y, e))
        .sum())
}

/// Gradient of the log-likelihood with respect to (α, β₁, …, β_p).
pub fn log_likelihood_gradient<F: Scalar>(model: &FittedModel<F>, data: &Dataset<F>) -> Result<Array1<F>> {
    check_dims(model, data)?;
    let eta = linear_predictors(data, model.alpha, &model.beta);
    let resid: Vec<F> = eta
        .iter()
        .zip(data.y())
        .map(|(&e, &y)| y - sigmoid(e))
        .collect();
    let mut grad = Array1::zeros(data.p() + 1);
    grad[0] = resid.iter().copied().sum();
    for j in 0..data.p() {
        grad[j + 1] = data
            .column(j)
            .iter()
            .zip(&resid)
            .map(|(&x, &r)| x * r)
            .sum();
    }
    Ok(grad)
}
