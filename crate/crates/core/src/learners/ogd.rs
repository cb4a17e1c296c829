//! Projected online gradient descent over the monotone box.
//!
//! Kept as a baseline precisely because it fails: labeling left to right
//! with zeros (or right to left with ones) never moves the coordinate
//! about to be queried, so the total loss equals the loss of the initial
//! parameter vector.

use crate::oracle::project_isotonic_box;
use crate::types::IsotonicFunction;

use super::{LearnerError, OnlineLearner};

/// One descent-and-project step under squared loss: predict the current
/// coordinate, move it against the gradient `2 eta (prediction - label)`,
/// then project back onto the monotone box.
pub fn ogd_step(
    current: &IsotonicFunction,
    position: usize,
    label: f64,
    eta: f64,
) -> (f64, IsotonicFunction) {
    let prediction = current.values()[position];
    let mut moved = current.values().to_vec();
    moved[position] -= 2.0 * eta * (prediction - label);
    (prediction, project_isotonic_box(&moved))
}

#[derive(Debug, Clone)]
pub struct OgdLearner {
    parameters: IsotonicFunction,
    eta: f64,
    labeled: Vec<bool>,
}

impl OgdLearner {
    pub fn new(init: IsotonicFunction, eta: f64) -> Result<Self, LearnerError> {
        if init.is_empty() {
            return Err(LearnerError::InvalidParameter("horizon must be positive".into()));
        }
        if eta < 0.0 {
            return Err(LearnerError::InvalidParameter("eta must be nonnegative".into()));
        }
        let horizon = init.len();
        Ok(Self {
            parameters: init,
            eta,
            labeled: vec![false; horizon],
        })
    }

    pub fn parameters(&self) -> &IsotonicFunction {
        &self.parameters
    }
}

impl OnlineLearner for OgdLearner {
    fn horizon(&self) -> usize {
        self.labeled.len()
    }

    fn name(&self) -> String {
        format!("ogd(eta={})", self.eta)
    }

    fn predict(&mut self, position: usize) -> Result<f64, LearnerError> {
        if position >= self.labeled.len() {
            return Err(LearnerError::OutOfRange {
                position,
                horizon: self.labeled.len(),
            });
        }
        if self.labeled[position] {
            return Err(LearnerError::AlreadyLabeled(position));
        }
        Ok(self.parameters.values()[position])
    }

    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        if position >= self.labeled.len() {
            return Err(LearnerError::OutOfRange {
                position,
                horizon: self.labeled.len(),
            });
        }
        if self.labeled[position] {
            return Err(LearnerError::AlreadyLabeled(position));
        }
        let (_, updated) = ogd_step(&self.parameters, position, label, self.eta);
        self.parameters = updated;
        self.labeled[position] = true;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_step_frozen_example() {
        let f = IsotonicFunction::new(vec![0.5, 0.5]).unwrap();
        let (pred, updated) = ogd_step(&f, 0, 0.0, 0.25);
        assert_abs_diff_eq!(pred, 0.5);
        // descend 2 * 0.25 * 0.5 = 0.25; still monotone so projection is identity
        assert_eq!(updated.values(), &[0.25, 0.5]);
    }

    #[test]
    fn zero_eta_never_moves() {
        let init = IsotonicFunction::diagonal(4);
        let mut learner = OgdLearner::new(init.clone(), 0.0).unwrap();
        for pos in [2usize, 0, 3, 1] {
            let p = learner.predict(pos).unwrap();
            assert_abs_diff_eq!(p, init.values()[pos]);
            learner.observe(pos, 1.0).unwrap();
        }
    }

    #[test]
    fn left_to_right_zeros_never_touch_unqueried_coordinates() {
        let init = IsotonicFunction::diagonal(6);
        let mut learner = OgdLearner::new(init.clone(), 0.7).unwrap();
        for pos in 0..6 {
            let p = learner.predict(pos).unwrap();
            // the prediction always equals the initial coordinate
            assert_abs_diff_eq!(p, init.values()[pos], epsilon = 1e-12);
            learner.observe(pos, 0.0).unwrap();
        }
    }
}
