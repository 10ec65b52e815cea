//! Stratified k-fold cross-validation of the lasso penalty, selecting the λ
//! with the largest mean validation AUC.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lasso::{fit_lasso_path_on_grid, lambda_grid, lambda_max, LambdaPath, PathConfig};
use crate::metrics::auc_of;
use crate::model::{Dataset, FittedModel};
use crate::scalar::Scalar;
use crate::seeds;

/// Fold index of every row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub fold_of: Vec<usize>,
    /// Folds actually used; smaller than `requested_k` when a class is too small.
    pub k: usize,
    pub requested_k: usize,
}

impl FoldAssignment {
    pub fn validation_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn training_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }

    pub fn was_reduced(&self) -> bool {
        self.k < self.requested_k
    }
}

/// Stratified fold assignment: each class is shuffled with the seeded
/// generator and dealt round-robin into the folds, the second class picking
/// up where the first stopped so that fold sizes stay balanced.
///
/// When a class has fewer than `k` rows, `k` drops to that class size.
pub fn make_folds<F: Scalar>(data: &Dataset<F>, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {k}")));
    }
    let (mut neg, mut pos) = data.class_indices();
    let smallest = neg.len().min(pos.len());
    if smallest < 2 {
        return Err(Error::DegenerateData(format!(
            "cross-validation needs at least 2 rows per class, got {} positives and {} negatives",
            pos.len(),
            neg.len()
        )));
    }
    let k_used = k.min(smallest);
    let mut rng = seeds::rng(seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut fold_of = vec![0; data.n()];
    let mut next = 0;
    for &i in pos.iter().chain(neg.iter()) {
        fold_of[i] = next;
        next = (next + 1) % k_used;
    }
    Ok(FoldAssignment {
        fold_of,
        k: k_used,
        requested_k: k,
    })
}

#[derive(Debug, Clone)]
pub struct CvResult<F> {
    pub lambdas: Vec<F>,
    /// Mean validation AUC per λ over the folds whose validation part has both classes.
    pub mean_auc: Vec<F>,
    /// `fold_auc[fold][λ]`; `None` for a single-class validation fold.
    pub fold_auc: Vec<Vec<Option<F>>>,
    pub chosen_index: usize,
    pub chosen_lambda: F,
    pub folds: FoldAssignment,
}

/// Cross-validates the lasso path on a grid shared by all folds and anchored at
/// the full-data λ_max. Ties in mean AUC go to the larger λ.
pub fn choose_lambda_cv<F: Scalar>(data: &Dataset<F>, k: usize, seed: u64, config: &PathConfig<F>) -> Result<CvResult<F>> {
    config.validate()?;
    let lmax = lambda_max(data)?;
    let grid = lambda_grid(lmax, config.n_lambda, config.min_ratio_for(data.n(), data.p()));
    let folds = make_folds(data, k, seed)?;

    let fold_auc: Vec<Vec<Option<F>>> = (0..folds.k)
        .into_par_iter()
        .map(|f| -> Result<Vec<Option<F>>> {
            let train = data.select_rows(&folds.training_rows(f))?;
            let valid = data.select_rows(&folds.validation_rows(f))?;
            let path = fit_lasso_path_on_grid(&train, &grid, config)?;
            if !valid.has_both_classes() {
                return Ok(vec![None; grid.len()]);
            }
            let labels = valid.y().as_slice().expect("contiguous outcomes");
            path.solutions
                .iter()
                .map(|m| {
                    let scores = m.linear_predictors(&valid)?;
                    Ok(Some(auc_of(scores.as_slice().expect("contiguous"), labels)?))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut mean_auc = Vec::with_capacity(grid.len());
    for l in 0..grid.len() {
        let vals: Vec<F> = fold_auc.iter().filter_map(|row| row[l]).collect();
        if vals.is_empty() {
            return Err(Error::TuningFailed(format!(
                "every validation fold is single-class at lambda index {l}"
            )));
        }
        mean_auc.push(vals.iter().copied().sum::<F>() / F::lit(vals.len() as f64));
    }
    let mut chosen_index = 0;
    for (l, &a) in mean_auc.iter().enumerate() {
        if a > mean_auc[chosen_index] {
            chosen_index = l;
        }
    }
    Ok(CvResult {
        chosen_lambda: grid[chosen_index],
        lambdas: grid,
        mean_auc,
        fold_auc,
        chosen_index,
        folds,
    })
}

/// Lasso with a cross-validated penalty: the CV result, the full-data path on
/// the same grid, and the model at the chosen λ.
#[derive(Debug, Clone)]
pub struct LassoCvFit<F: Scalar> {
    pub cv: CvResult<F>,
    pub path: LambdaPath<F>,
    pub model: FittedModel<F>,
}

pub fn fit_lasso_cv<F: Scalar>(data: &Dataset<F>, k: usize, seed: u64, config: &PathConfig<F>) -> Result<LassoCvFit<F>> {
    let cv = choose_lambda_cv(data, k, seed, config)?;
    let path = fit_lasso_path_on_grid(data, &cv.lambdas, config)?;
    let model = path.solutions[cv.chosen_index].clone();
    Ok(LassoCvFit { cv, path, model })
}
