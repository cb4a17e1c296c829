//! Follow the regularized leader with a squared-distance regularizer.
//!
//! The per-round problem — minimize `lambda ||f - f0||^2` plus the squared
//! error on the labeled positions over monotone f — reduces to a weighted
//! isotonic regression: coordinate `i` gets weight `lambda + n_i` and
//! target `(lambda f0_i + n_i y_i) / (lambda + n_i)`, where `n_i` is 1
//! once position `i` is labeled and 0 before.

use crate::oracle::pava;
use crate::types::IsotonicFunction;

use super::{LearnerError, OnlineLearner};

/// Solve the regularized-leader problem for the given label assignment.
pub fn ftrl_fit(
    center: &IsotonicFunction,
    lambda: f64,
    labels: &[Option<f64>],
) -> Result<IsotonicFunction, LearnerError> {
    if lambda <= 0.0 {
        return Err(LearnerError::InvalidParameter("lambda must be positive".into()));
    }
    if center.len() != labels.len() {
        return Err(LearnerError::InvalidParameter(
            "label vector length must match the center".into(),
        ));
    }
    let mut targets = Vec::with_capacity(labels.len());
    let mut weights = Vec::with_capacity(labels.len());
    for (&c, lab) in center.values().iter().zip(labels) {
        match lab {
            Some(y) => {
                targets.push((lambda * c + y) / (lambda + 1.0));
                weights.push(lambda + 1.0);
            }
            None => {
                targets.push(c);
                weights.push(lambda);
            }
        }
    }
    let fit = pava(&targets, &weights)
        .map_err(|e| LearnerError::InvalidParameter(e.to_string()))?;
    // targets are convex combinations of values in [0, 1]
    Ok(IsotonicFunction::new(fit.into_values())
        .expect("pooled targets stay inside the unit box"))
}

#[derive(Debug, Clone)]
pub struct FtrlLearner {
    center: IsotonicFunction,
    lambda: f64,
    labels: Vec<Option<f64>>,
}

impl FtrlLearner {
    pub fn new(center: IsotonicFunction, lambda: f64) -> Result<Self, LearnerError> {
        if center.is_empty() {
            return Err(LearnerError::InvalidParameter("horizon must be positive".into()));
        }
        if lambda <= 0.0 {
            return Err(LearnerError::InvalidParameter("lambda must be positive".into()));
        }
        let horizon = center.len();
        Ok(Self {
            center,
            lambda,
            labels: vec![None; horizon],
        })
    }
}

impl OnlineLearner for FtrlLearner {
    fn horizon(&self) -> usize {
        self.labels.len()
    }

    fn name(&self) -> String {
        format!("ftrl(lambda={})", self.lambda)
    }

    fn predict(&mut self, position: usize) -> Result<f64, LearnerError> {
        if position >= self.labels.len() {
            return Err(LearnerError::OutOfRange {
                position,
                horizon: self.labels.len(),
            });
        }
        if self.labels[position].is_some() {
            return Err(LearnerError::AlreadyLabeled(position));
        }
        let fit = ftrl_fit(&self.center, self.lambda, &self.labels)?;
        Ok(fit.values()[position])
    }

    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        if position >= self.labels.len() {
            return Err(LearnerError::OutOfRange {
                position,
                horizon: self.labels.len(),
            });
        }
        if self.labels[position].is_some() {
            return Err(LearnerError::AlreadyLabeled(position));
        }
        self.labels[position] = Some(label);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_history_returns_the_center() {
        let center = IsotonicFunction::new(vec![0.1, 0.4, 0.9]).unwrap();
        let fit = ftrl_fit(&center, 2.5, &[None, None, None]).unwrap();
        assert_eq!(fit.values(), center.values());
    }

    #[test]
    fn one_label_frozen_example() {
        // center (0.5, 0.5), lambda 1, label 1 at the left position:
        // targets (0.75, 0.5) with weights (2, 1) pool to 2/3 everywhere
        let center = IsotonicFunction::new(vec![0.5, 0.5]).unwrap();
        let fit = ftrl_fit(&center, 1.0, &[Some(1.0), None]).unwrap();
        assert_abs_diff_eq!(fit.values()[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.values()[1], 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn killer_order_keeps_unlabeled_coordinates_at_the_center() {
        let center = IsotonicFunction::diagonal(8);
        let mut learner = FtrlLearner::new(center.clone(), 0.5).unwrap();
        for pos in 0..8 {
            let p = learner.predict(pos).unwrap();
            assert_abs_diff_eq!(p, center.values()[pos], epsilon = 1e-12);
            learner.observe(pos, 0.0).unwrap();
        }
    }
}
