//! The three loss functions the games are scored under.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `(y - p)^2`
    Squared,
    /// `-y ln p - (1-y) ln(1-p)`, with `0 ln 0 := 0`
    Entropic,
    /// `|y - p|`
    Absolute,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LossKind::Squared => "squared",
            LossKind::Entropic => "entropic",
            LossKind::Absolute => "absolute",
        };
        f.write_str(s)
    }
}

impl FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "squared" => Ok(LossKind::Squared),
            "entropic" => Ok(LossKind::Entropic),
            "absolute" => Ok(LossKind::Absolute),
            other => Err(format!(
                "unknown loss '{other}' (expected squared, entropic, or absolute)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LossError {
    /// A boundary prediction under entropic loss with a label on the other
    /// side.  Distinguished so callers can reject the offending learner
    /// instead of crashing or propagating `inf`.
    #[error("entropic loss is infinite: prediction {prediction} against label {label}")]
    InfiniteEntropic { label: f64, prediction: f64 },
}

/// Loss of predicting `prediction` when the label is `label`.  Both are
/// expected in `[0, 1]`; under entropic loss the prediction must be
/// interior unless the label sits on the same boundary.
pub fn loss(kind: LossKind, label: f64, prediction: f64) -> Result<f64, LossError> {
    match kind {
        LossKind::Squared => Ok((label - prediction) * (label - prediction)),
        LossKind::Absolute => Ok((label - prediction).abs()),
        LossKind::Entropic => {
            let pos = entropy_term(label, prediction, label, prediction)?;
            let neg = entropy_term(1.0 - label, 1.0 - prediction, label, prediction)?;
            Ok(pos + neg)
        }
    }
}

// -w ln(arg), with the 0 ln 0 convention applied to w = 0.
fn entropy_term(w: f64, arg: f64, label: f64, prediction: f64) -> Result<f64, LossError> {
    if w == 0.0 {
        Ok(0.0)
    } else if arg <= 0.0 {
        Err(LossError::InfiniteEntropic { label, prediction })
    } else {
        Ok(-w * arg.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn frozen_values() {
        assert_abs_diff_eq!(loss(LossKind::Squared, 1.0, 0.5).unwrap(), 0.25);
        assert_abs_diff_eq!(loss(LossKind::Absolute, 0.3, 0.3).unwrap(), 0.0);
        // direct evaluation: -0.5 ln 0.5 - 0.5 ln 0.5 = ln 2
        assert_abs_diff_eq!(
            loss(LossKind::Entropic, 0.5, 0.5).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn entropic_boundaries() {
        assert_eq!(loss(LossKind::Entropic, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(loss(LossKind::Entropic, 1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            loss(LossKind::Entropic, 1.0, 0.0),
            Err(LossError::InfiniteEntropic { .. })
        ));
        assert!(matches!(
            loss(LossKind::Entropic, 0.5, 1.0),
            Err(LossError::InfiniteEntropic { .. })
        ));
        // prediction on a boundary matching the label is fine
        assert_eq!(loss(LossKind::Entropic, 0.0, 0.0).unwrap(), 0.0);
    }

    proptest! {
        /// l(y, p) = l(1-y, 1-p) for all three losses.
        #[test]
        fn complement_symmetry(y in 0.0..=1.0f64, p in 1e-9..=0.999999999f64) {
            for kind in [LossKind::Squared, LossKind::Absolute, LossKind::Entropic] {
                let a = loss(kind, y, p).unwrap();
                let b = loss(kind, 1.0 - y, 1.0 - p).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }

        /// Convexity in the prediction: midpoint loss <= average loss.
        #[test]
        fn convex_in_prediction(
            y in 0.0..=1.0f64,
            p1 in 1e-6..=0.999999f64,
            p2 in 1e-6..=0.999999f64,
        ) {
            for kind in [LossKind::Squared, LossKind::Absolute, LossKind::Entropic] {
                let mid = loss(kind, y, 0.5 * (p1 + p2)).unwrap();
                let avg = 0.5 * loss(kind, y, p1).unwrap() + 0.5 * loss(kind, y, p2).unwrap();
                prop_assert!(mid <= avg + 1e-12);
            }
        }
    }
}
