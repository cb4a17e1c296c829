//! Exponentiated gradient on the increment parameterization.
//!
//! A monotone function maps one-to-one to a point of the (T+1)-simplex
//! through its increments (with pinned endpoints 0 and 1), and the
//! prediction at position `i` is the prefix sum of the first `i + 1`
//! coordinates.  The update is multiplicative in the loss gradient, which
//! touches exactly those prefix coordinates.

use crate::loss::LossKind;

use super::{LearnerError, OnlineLearner};

/// Learning rate from the standard tuning for squared loss on this
/// problem: `2 sqrt(ln(T+1)) / (sqrt(T/2) + sqrt(ln(T+1)))`.
pub fn default_eta(horizon: usize) -> f64 {
    let d = ((horizon + 1) as f64).ln();
    2.0 * d.sqrt() / ((horizon as f64 / 2.0).sqrt() + d.sqrt())
}

/// Regret guarantee under squared loss with [`default_eta`]:
/// `sqrt(T ln(T+1) / 2) + ln(T+1) / 2`.
pub fn squared_regret_bound(horizon: usize) -> f64 {
    let d = ((horizon + 1) as f64).ln();
    (horizon as f64 * d / 2.0).sqrt() + d / 2.0
}

/// One round of exponentiated gradient: predict the prefix sum at
/// `position`, then reweight the prefix coordinates by the loss gradient
/// at that prediction and renormalize.  Returns the prediction and the
/// updated simplex point.
pub fn eg_step(
    weights: &[f64],
    position: usize,
    label: f64,
    eta: f64,
    kind: LossKind,
) -> Result<(f64, Vec<f64>), LearnerError> {
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(LearnerError::NotNormalized(sum));
    }
    if position + 1 >= weights.len() {
        return Err(LearnerError::OutOfRange {
            position,
            horizon: weights.len().saturating_sub(1),
        });
    }
    let prediction: f64 = weights[..=position].iter().sum::<f64>().clamp(0.0, 1.0);
    let gradient = match kind {
        LossKind::Squared => 2.0 * (prediction - label),
        LossKind::Absolute => {
            // subgradient; defined as 0 at equality
            if prediction > label {
                1.0
            } else if prediction < label {
                -1.0
            } else {
                0.0
            }
        }
        LossKind::Entropic => {
            return Err(LearnerError::InvalidParameter(
                "exponentiated gradient plays squared or absolute loss".into(),
            ))
        }
    };
    let factor = (-eta * gradient).exp();
    let mut updated: Vec<f64> = weights.to_vec();
    for w in updated[..=position].iter_mut() {
        *w *= factor;
    }
    let z: f64 = updated.iter().sum();
    for w in updated.iter_mut() {
        *w /= z;
    }
    Ok((prediction, updated))
}

#[derive(Debug, Clone)]
pub struct EgLearner {
    weights: Vec<f64>,
    eta: f64,
    kind: LossKind,
    labeled: Vec<bool>,
    default_eta: bool,
}

impl EgLearner {
    /// Uniform initial distribution on the (T+1)-simplex; `eta = None`
    /// applies the default tuning.
    pub fn new(horizon: usize, kind: LossKind, eta: Option<f64>) -> Result<Self, LearnerError> {
        if horizon == 0 {
            return Err(LearnerError::InvalidParameter("horizon must be positive".into()));
        }
        if kind == LossKind::Entropic {
            return Err(LearnerError::InvalidParameter(
                "exponentiated gradient plays squared or absolute loss".into(),
            ));
        }
        let default = eta.is_none();
        Ok(Self {
            weights: vec![1.0 / (horizon + 1) as f64; horizon + 1],
            eta: eta.unwrap_or_else(|| default_eta(horizon)),
            kind,
            labeled: vec![false; horizon],
            default_eta: default,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl OnlineLearner for EgLearner {
    fn horizon(&self) -> usize {
        self.labeled.len()
    }

    fn name(&self) -> String {
        match self.kind {
            LossKind::Absolute => "eg-absolute".into(),
            _ => "eg".into(),
        }
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
        Ok(self.weights[..=position].iter().sum::<f64>().clamp(0.0, 1.0))
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
        let (_, updated) = eg_step(&self.weights, position, label, self.eta, self.kind)?;
        self.weights = updated;
        self.labeled[position] = true;
        Ok(())
    }

    fn regret_bound(&self, _noise_free: bool, _isotonic_order: bool) -> Option<f64> {
        if self.kind == LossKind::Squared && self.default_eta {
            Some(squared_regret_bound(self.horizon()))
        } else {
            None
        }
    }
}
