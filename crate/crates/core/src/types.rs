//! Shared domain types: monotone functions, reveal orders, label
//! sequences, and game transcripts.

use serde::Serialize;
use thiserror::Error;

use crate::loss::LossKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("sequence must be non-empty")]
    Empty,
    #[error("value {value} at position {position} lies outside [0, 1]")]
    OutOfRange { position: usize, value: f64 },
    #[error("monotonicity violated at position {position}: {previous} > {value}")]
    NotMonotone {
        position: usize,
        previous: f64,
        value: f64,
    },
    #[error("reveal order is not a permutation of 0..{len}: problem at entry {entry}")]
    NotAPermutation { len: usize, entry: usize },
    #[error("transcript does not cover every position exactly once")]
    IncompleteTranscript,
}

/// A vector `0 <= f_0 <= f_1 <= ... <= f_{T-1} <= 1`: one member of the
/// comparator class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotonicFunction(Vec<f64>);

impl IsotonicFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, DomainError> {
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(DomainError::OutOfRange {
                    position: i,
                    value: v,
                });
            }
            if i > 0 && values[i - 1] > v {
                return Err(DomainError::NotMonotone {
                    position: i,
                    previous: values[i - 1],
                    value: v,
                });
            }
        }
        Ok(Self(values))
    }

    pub fn constant(len: usize, value: f64) -> Result<Self, DomainError> {
        Self::new(vec![value; len])
    }

    /// The ramp `f_i = (i+1)/T`, a convenient strictly increasing member.
    pub fn diagonal(len: usize) -> Self {
        let t = len as f64;
        Self((1..=len).map(|i| i as f64 / t).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Permutation of positions `0..T` giving the order in which the adversary
/// reveals them; no position may repeat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevealOrder(Vec<usize>);

impl RevealOrder {
    pub fn new(indices: Vec<usize>) -> Result<Self, DomainError> {
        let len = indices.len();
        let mut seen = vec![false; len];
        for (entry, &i) in indices.iter().enumerate() {
            if i >= len || seen[i] {
                return Err(DomainError::NotAPermutation { len, entry });
            }
            seen[i] = true;
        }
        Ok(Self(indices))
    }

    /// Left-to-right order `0, 1, ..., T-1`.
    pub fn isotonic(len: usize) -> Self {
        Self((0..len).collect())
    }

    /// Right-to-left order `T-1, ..., 1, 0`.
    pub fn antitonic(len: usize) -> Self {
        Self((0..len).rev().collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_isotonic(&self) -> bool {
        self.0.iter().enumerate().all(|(t, &i)| t == i)
    }
}

/// Labels indexed by position (not by trial), each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelSequence(Vec<f64>);

impl LabelSequence {
    pub fn new(labels: Vec<f64>) -> Result<Self, DomainError> {
        for (i, &v) in labels.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(DomainError::OutOfRange {
                    position: i,
                    value: v,
                });
            }
        }
        Ok(Self(labels))
    }

    pub fn labels(&self) -> &[f64] {
        &self.0
    }

    pub fn into_labels(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when the labels are non-decreasing in position, i.e. the
    /// noise-free regime where the comparator loss is zero.
    pub fn is_isotonic(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }
}

/// One played trial. `trial` counts from 1; `index` is the 1-based
/// position that was revealed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub index: usize,
    pub prediction: f64,
    pub label: f64,
    pub loss: f64,
}

/// Complete record of one game: every trial in play order, plus the loss
/// under which it was scored.
#[derive(Debug, Clone, Serialize)]
pub struct GameTranscript {
    pub kind: LossKind,
    pub trials: Vec<TrialRecord>,
}

impl GameTranscript {
    pub fn horizon(&self) -> usize {
        self.trials.len()
    }

    pub fn total_loss(&self) -> f64 {
        self.trials.iter().map(|r| r.loss).sum()
    }

    /// Labels rearranged from trial order back into position order.
    pub fn labels_in_position_order(&self) -> Result<Vec<f64>, DomainError> {
        let t = self.trials.len();
        let mut labels = vec![f64::NAN; t];
        let mut seen = vec![false; t];
        for r in &self.trials {
            let pos = r.index.checked_sub(1).ok_or(DomainError::IncompleteTranscript)?;
            if pos >= t || seen[pos] {
                return Err(DomainError::IncompleteTranscript);
            }
            seen[pos] = true;
            labels[pos] = r.label;
        }
        Ok(labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotonic_function_accepts_monotone() {
        assert!(IsotonicFunction::new(vec![0.0, 0.25, 0.25, 1.0]).is_ok());
        assert!(IsotonicFunction::new(vec![]).is_ok());
    }

    #[test]
    fn isotonic_function_rejects_violations() {
        assert!(matches!(
            IsotonicFunction::new(vec![0.3, 0.2]),
            Err(DomainError::NotMonotone { position: 1, .. })
        ));
        assert!(matches!(
            IsotonicFunction::new(vec![-0.1]),
            Err(DomainError::OutOfRange { .. })
        ));
        assert!(matches!(
            IsotonicFunction::new(vec![0.5, 1.2]),
            Err(DomainError::OutOfRange { .. })
        ));
    }

    #[test]
    fn diagonal_is_isotonic() {
        let f = IsotonicFunction::diagonal(5);
        assert_eq!(f.values(), &[0.2, 0.4, 0.6, 0.8, 1.0]);
        assert!(IsotonicFunction::new(f.values().to_vec()).is_ok());
    }

    #[test]
    fn reveal_order_rejects_repeats() {
        assert!(RevealOrder::new(vec![0, 2, 1]).is_ok());
        assert!(RevealOrder::new(vec![0, 0, 1]).is_err());
        assert!(RevealOrder::new(vec![0, 3]).is_err());
    }

    #[test]
    fn transcript_restores_position_order() {
        let transcript = GameTranscript {
            kind: LossKind::Squared,
            trials: vec![
                TrialRecord {
                    trial: 1,
                    index: 2,
                    prediction: 0.5,
                    label: 0.7,
                    loss: 0.04,
                },
                TrialRecord {
                    trial: 2,
                    index: 1,
                    prediction: 0.1,
                    label: 0.2,
                    loss: 0.01,
                },
            ],
        };
        assert_eq!(transcript.labels_in_position_order().unwrap(), vec![0.2, 0.7]);
        assert!((transcript.total_loss() - 0.05).abs() < 1e-15);
    }
}
