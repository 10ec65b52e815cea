//! Hybrid pipelines: stepwise AIC selection followed by maximum likelihood
//! (StepML), and lasso support selection followed by a maximum-likelihood
//! refit (LassoML).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lasso::PathConfig;
use crate::mle::{fit_mle_detailed, IrlsConfig, MleFit, MleStatus};
use crate::model::{Dataset, FittedModel, Method};
use crate::scalar::Scalar;
use crate::tuning::fit_lasso_cv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

impl Direction {
    fn adds(self) -> bool {
        matches!(self, Direction::Forward | Direction::Both)
    }

    fn removes(self) -> bool {
        matches!(self, Direction::Backward | Direction::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// 2·(k + 1) − 2ℓ
    Aic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartModel {
    InterceptOnly,
    /// Every column, as in the usual `step(glm(y ~ .))` workflow. Falls back
    /// to the intercept-only start when p exceeds the model-size cap.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepwiseConfig<F> {
    pub direction: Direction,
    pub criterion: Criterion,
    /// Cap on selected columns; `None` means min(p, n − 2).
    pub max_model_size: Option<usize>,
    pub start: StartModel,
    /// Whether a candidate whose fit separated (fitted probabilities at 0 or
    /// 1, log-likelihood near 0) may be adopted on its AIC, as many
    /// statistical packages do. Other non-converged fits are never adopted.
    pub admit_separated: bool,
    pub irls: IrlsConfig<F>,
}

impl<F: Scalar> Default for StepwiseConfig<F> {
    fn default() -> Self {
        Self {
            direction: Direction::Both,
            criterion: Criterion::Aic,
            max_model_size: None,
            start: StartModel::Full,
            admit_separated: false,
            irls: IrlsConfig::default(),
        }
    }
}

impl<F> StepwiseConfig<F> {
    fn eligible(&self, fit_status: MleStatus) -> bool {
        fit_status == MleStatus::Converged || (self.admit_separated && fit_status == MleStatus::Separation)
    }

    pub fn size_cap(&self, n: usize, p: usize) -> usize {
        self.max_model_size
            .unwrap_or_else(|| p.min(n.saturating_sub(2)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Add(usize),
    Remove(usize),
}

impl Move {
    pub fn column(self) -> usize {
        match self {
            Move::Add(j) | Move::Remove(j) => j,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<F> {
    pub step: Move,
    pub aic: F,
    pub log_likelihood: F,
    pub converged: bool,
    pub status: MleStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepwiseRound<F> {
    pub aic_before: F,
    pub candidates: Vec<Candidate<F>>,
    pub adopted: Option<Move>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepwiseTrace<F> {
    pub rounds: Vec<StepwiseRound<F>>,
    /// AIC of the starting model and after every adopted move.
    pub aic_path: Vec<F>,
}

fn aic<F: Scalar>(fit: &MleFit<F>) -> F {
    let k = F::lit((fit.model.support.len() + 1) as f64);
    F::lit(2.0) * k - F::lit(2.0) * fit.log_likelihood
}

/// Stepwise AIC selection with ML estimation of the final column set.
pub fn fit_stepml<F: Scalar>(data: &Dataset<F>, config: &StepwiseConfig<F>) -> Result<FittedModel<F>> {
    Ok(fit_stepml_traced(data, config)?.0)
}

/// As [`fit_stepml`], also returning every round's candidate evaluations.
///
/// Candidates whose ML fit did not converge are never adopted, except
/// separated fits under `admit_separated`. Ties in AIC go to the lowest column
/// index.
pub fn fit_stepml_traced<F: Scalar>(data: &Dataset<F>, config: &StepwiseConfig<F>) -> Result<(FittedModel<F>, StepwiseTrace<F>)> {
    config.irls.validate()?;
    let p = data.p();
    let cap = config.size_cap(data.n(), p);
    if !data.has_both_classes() {
        let null = fit_mle_detailed(data, &[], &config.irls, None)?;
        let trace = StepwiseTrace {
            rounds: Vec::new(),
            aic_path: vec![aic(&null)],
        };
        return Ok((finish(null.model), trace));
    }
    let start_cols: Vec<usize> = match config.start {
        StartModel::Full if p <= cap => (0..p).collect(),
        _ => Vec::new(),
    };
    let mut current = fit_mle_detailed(data, &start_cols, &config.irls, None)?;
    let mut trace = StepwiseTrace {
        rounds: Vec::new(),
        aic_path: vec![aic(&current)],
    };
    if !config.eligible(current.status) && start_cols.is_empty() {
        return Ok((finish(current.model), trace));
    }

    loop {
        let cols = current.model.support.clone();
        let current_aic = aic(&current);
        let mut moves = Vec::new();
        if config.direction.adds() && cols.len() < cap {
            moves.extend((0..p).filter(|j| !cols.contains(j)).map(Move::Add));
        }
        if config.direction.removes() {
            moves.extend(cols.iter().copied().map(Move::Remove));
        }
        if moves.is_empty() {
            break;
        }

        let mut candidates = Vec::with_capacity(moves.len());
        let mut best: Option<(F, Move, MleFit<F>)> = None;
        for step in moves {
            let mut next = cols.clone();
            let mut start = current.model.clone();
            match step {
                Move::Add(j) => next.push(j),
                Move::Remove(j) => {
                    next.retain(|&c| c != j);
                    start.beta[j] = F::zero();
                }
            }
            let fit = fit_mle_detailed(data, &next, &config.irls, Some(&start))?;
            let score = aic(&fit);
            candidates.push(Candidate {
                step,
                aic: score,
                log_likelihood: fit.log_likelihood,
                converged: fit.model.converged,
                status: fit.status,
            });
            if !config.eligible(fit.status) || !score.is_finite() {
                continue;
            }
            let col = step.column();
            let better = match &best {
                None => true,
                Some((b_aic, b_step, _)) => {
                    score < *b_aic || (score == *b_aic && col < b_step.column())
                }
            };
            if better {
                best = Some((score, step, fit));
            }
        }

        let adopted = match best {
            Some((score, step, fit)) if score < current_aic => {
                current = fit;
                trace.aic_path.push(score);
                Some(step)
            }
            _ => None,
        };
        let done = adopted.is_none();
        trace.rounds.push(StepwiseRound {
            aic_before: current_aic,
            candidates,
            adopted,
        });
        if done {
            break;
        }
    }
    Ok((finish(current.model), trace))
}

fn finish<F: Scalar>(mut model: FittedModel<F>) -> FittedModel<F> {
    model.method = Method::StepMl;
    model
}

/// Refits the nonzero support of a lasso model by maximum likelihood.
///
/// Falls back to the lasso coefficients (flagged by `lasso_fallback`) when the
/// support is too large for the sample or the refit does not converge.
pub fn refit_support<F: Scalar>(data: &Dataset<F>, lasso: &FittedModel<F>, irls: &IrlsConfig<F>) -> Result<FittedModel<F>> {
    let support = lasso.nonzero_support();
    let fallback = || {
        let mut m = lasso.clone();
        m.method = Method::LassoMl;
        m.support = support.clone();
        m.lasso_fallback = true;
        m
    };
    if support.len() + 1 >= data.n() {
        return Ok(fallback());
    }
    let fit = fit_mle_detailed(data, &support, irls, None)?;
    if !fit.model.converged {
        return Ok(fallback());
    }
    let mut model = fit.model;
    model.method = Method::LassoMl;
    model.lambda = lasso.lambda;
    Ok(model)
}

/// LassoML: cross-validated lasso selects the support, maximum likelihood
/// estimates it.
pub fn fit_lassoml<F: Scalar>(
    data: &Dataset<F>,
    k: usize,
    seed: u64,
    path: &PathConfig<F>,
    irls: &IrlsConfig<F>,
) -> Result<FittedModel<F>> {
    let lasso = fit_lasso_cv(data, k, seed, path)?;
    refit_support(data, &lasso.model, irls)
}
