//! Discrimination measures: ROC AUC via the Mann–Whitney rank sum, and the
//! Gini coefficient 2·(AUC − ½).

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Model scores paired with observed 0/1 outcomes.
#[derive(Debug, Clone, Copy)]
pub struct ScoredOutcomes<'a, F> {
    scores: &'a [F],
    labels: &'a [F],
}

impl<'a, F: Scalar> ScoredOutcomes<'a, F> {
    pub fn new(scores: &'a [F], labels: &'a [F]) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: scores.len(),
            });
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::InvalidInput("NaN score".into()));
        }
        if labels.iter().any(|&l| l != F::zero() && l != F::one()) {
            return Err(Error::InvalidInput("labels must be 0 or 1".into()));
        }
        Ok(Self { scores, labels })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == F::one()).count()
    }
}

/// P(score⁺ > score⁻) + ½ P(score⁺ = score⁻), from midranks in O(n log n).
pub fn auc<F: Scalar>(s: &ScoredOutcomes<'_, F>) -> Result<F> {
    let n = s.len();
    let n_pos = s.positives();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateData(format!(
            "AUC needs both classes, got {n_pos} positives and {n_neg} negatives"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s.scores[a].partial_cmp(&s.scores[b]).unwrap_or(Ordering::Equal));

    // doubled midranks keep the rank sum integral
    let mut rank_sum2: u128 = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && s.scores[order[end]] == s.scores[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end; doubled midrank = start + 1 + end
        let mid2 = (start + 1 + end) as u128;
        let pos_in_tie = order[start..end]
            .iter()
            .filter(|&&i| s.labels[i] == F::one())
            .count() as u128;
        rank_sum2 += mid2 * pos_in_tie;
        start = end;
    }
    let np = n_pos as u128;
    // 2U = 2R − n⁺(n⁺ + 1)
    let u2 = rank_sum2 - np * (np + 1);
    let auc = u2 as f64 / (2.0 * n_pos as f64 * n_neg as f64);
    Ok(F::lit(auc))
}

/// 2·(AUC − ½); negative when the scores anti-discriminate.
pub fn gini<F: Scalar>(s: &ScoredOutcomes<'_, F>) -> Result<F> {
    let a = auc(s)?;
    Ok(F::lit(2.0) * (a - F::lit(0.5)))
}

/// Convenience wrapper over slices.
pub fn gini_of<F: Scalar>(scores: &[F], labels: &[F]) -> Result<F> {
    gini(&ScoredOutcomes::new(scores, labels)?)
}

/// Convenience wrapper over slices.
pub fn auc_of<F: Scalar>(scores: &[F], labels: &[F]) -> Result<F> {
    auc(&ScoredOutcomes::new(scores, labels)?)
}
