//! Exact minimax play for the noise-free game, where revealed labels are
//! promised to be monotone in position and the comparator loss is zero.
//!
//! Both strategies come from game-value recursions.
//!
//! *Arbitrary reveal order.*  Unlabeled positions form contiguous
//! segments, each bracketed by the nearest revealed labels `lo` and `hi`
//! (with 0 and 1 at the outer ends).  The worst-case value of a segment
//! with `n` unknowns and bracket `[lo, hi]` is `v_n (hi - lo)^2`, where
//! `v_0 = 0` and `v_{n+1}` maximizes a three-case combination of the two
//! sub-segment values a reveal would create.  The minimax prediction
//! within a segment interpolates between the bracket ends by the
//! difference of sub-segment coefficients; the table is bounded by
//! `log2(n+1) / 4`.
//!
//! *Left-to-right reveal order.*  The state collapses to the last label
//! `c` and the count of remaining points `n`; the value is
//! `a_n (1 - c)^2` with `a_0 = 0`, `a_1 = 1/4`, and
//! `a_n = ((a_{n-1} + 1) / 2)^2`, and the minimax prediction is
//! `(c+1)/2 + a_{n-1} (c-1)/2`.

use super::{LearnerError, OnlineLearner};

/// Value coefficients `v_0..=v_n` for the arbitrary-order game.
pub fn anyorder_minimax_values(n: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    for m in 0..n {
        let mut best = f64::NEG_INFINITY;
        for k in 0..=m {
            best = best.max(combine(values[k], values[m - k]));
        }
        values.push(best);
    }
    values
}

/// The value a reveal creates from left/right sub-segment coefficients
/// `a` and `b`.  Outside the central band one side is worthless and the
/// other is kept whole; inside, the adversary is indifferent between the
/// bracket ends.
pub fn combine(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d > 1.0 {
        a
    } else if d < -1.0 {
        b
    } else {
        0.25 * d * d + 0.5 * (a + b) + 0.25
    }
}

/// Regret guarantee of the arbitrary-order strategy in noise-free play:
/// `log2(T+1) / 4`.
pub fn anyorder_regret_bound(horizon: usize) -> f64 {
    0.25 * ((horizon + 1) as f64).log2()
}

/// Value coefficients `a_0..=a_n` for the left-to-right game
/// (`a_0 = 0`, `a_1 = 1/4`, `a_n = ((a_{n-1}+1)/2)^2`); all in `[0, 1]`.
pub fn isotonic_minimax_values(n: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    if n >= 1 {
        values.push(0.25);
    }
    for _ in 2..=n {
        let prev = *values.last().unwrap();
        values.push((0.5 * (prev + 1.0)) * (0.5 * (prev + 1.0)));
    }
    values
}

/// Minimax prediction in the left-to-right game given the last revealed
/// label `c` and the number `n >= 1` of points still to play (including
/// the one being predicted).
pub fn isotonic_minimax_prediction(
    last_label: f64,
    remaining: usize,
    values: &[f64],
) -> Result<f64, LearnerError> {
    if remaining < 1 {
        return Err(LearnerError::InvalidParameter(
            "no points remain to predict".into(),
        ));
    }
    let a = values[remaining - 1];
    Ok((0.5 * (last_label + 1.0) + 0.5 * a * (last_label - 1.0)).clamp(last_label, 1.0))
}

// ---------------------------------------------------------------------------
// Arbitrary order
// ---------------------------------------------------------------------------

/// A maximal run of contiguous unlabeled positions; `end` exclusive.
/// `lo`/`hi` are the nearest revealed labels on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    start: usize,
    end: usize,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone)]
pub struct MinimaxAnyOrder {
    horizon: usize,
    values: Vec<f64>,
    segments: Vec<Segment>,
}

impl MinimaxAnyOrder {
    pub fn new(horizon: usize) -> Self {
        let segments = if horizon == 0 {
            Vec::new()
        } else {
            vec![Segment {
                start: 0,
                end: horizon,
                lo: 0.0,
                hi: 1.0,
            }]
        };
        Self {
            horizon,
            values: anyorder_minimax_values(horizon),
            segments,
        }
    }

    fn segment_of(&self, position: usize) -> Option<usize> {
        let idx = self.segments.partition_point(|s| s.end <= position);
        match self.segments.get(idx) {
            Some(s) if s.start <= position && position < s.end => Some(idx),
            _ => None,
        }
    }

    /// Bracket `[lo, hi]` of the segment currently containing `position`.
    pub fn feasible_range(&self, position: usize) -> Option<(f64, f64)> {
        self.segment_of(position).map(|i| {
            let s = self.segments[i];
            (s.lo, s.hi)
        })
    }
}

impl OnlineLearner for MinimaxAnyOrder {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn name(&self) -> String {
        "minimax-any".into()
    }

    fn predict(&mut self, position: usize) -> Result<f64, LearnerError> {
        if position >= self.horizon {
            return Err(LearnerError::OutOfRange {
                position,
                horizon: self.horizon,
            });
        }
        let seg = self.segments[self
            .segment_of(position)
            .ok_or(LearnerError::AlreadyLabeled(position))?];
        let left = position - seg.start;
        let n = (seg.end - seg.start) - 1;
        let d = self.values[left] - self.values[n - left];
        // equalizes the adversary's two endpoint options:
        // (u - p)^2 + v_{n-k} w^2 = (v - p)^2 + v_k w^2 with w = hi - lo
        let prediction = if d > 1.0 {
            seg.hi
        } else if d < -1.0 {
            seg.lo
        } else {
            0.5 * (seg.lo + seg.hi) + 0.5 * (seg.hi - seg.lo) * d
        };
        Ok(prediction.clamp(seg.lo, seg.hi))
    }

    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        if position >= self.horizon {
            return Err(LearnerError::OutOfRange {
                position,
                horizon: self.horizon,
            });
        }
        let idx = self
            .segment_of(position)
            .ok_or(LearnerError::AlreadyLabeled(position))?;
        let seg = self.segments[idx];
        if label < seg.lo || label > seg.hi {
            return Err(LearnerError::NoiseFreeViolation {
                label,
                lo: seg.lo,
                hi: seg.hi,
            });
        }
        let mut replacement = Vec::with_capacity(2);
        if position > seg.start {
            replacement.push(Segment {
                start: seg.start,
                end: position,
                lo: seg.lo,
                hi: label,
            });
        }
        if position + 1 < seg.end {
            replacement.push(Segment {
                start: position + 1,
                end: seg.end,
                lo: label,
                hi: seg.hi,
            });
        }
        self.segments.splice(idx..=idx, replacement);
        Ok(())
    }

    fn regret_bound(&self, noise_free: bool, _isotonic_order: bool) -> Option<f64> {
        noise_free.then(|| anyorder_regret_bound(self.horizon))
    }
}

// ---------------------------------------------------------------------------
// Left-to-right order
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MinimaxIsotonic {
    horizon: usize,
    values: Vec<f64>,
    revealed: usize,
    last_label: f64,
}

impl MinimaxIsotonic {
    pub fn new(horizon: usize) -> Self {
        Self {
            horizon,
            values: isotonic_minimax_values(horizon),
            revealed: 0,
            last_label: 0.0,
        }
    }
}

impl OnlineLearner for MinimaxIsotonic {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn name(&self) -> String {
        "minimax-iso".into()
    }

    fn predict(&mut self, position: usize) -> Result<f64, LearnerError> {
        if position >= self.horizon {
            return Err(LearnerError::OutOfRange {
                position,
                horizon: self.horizon,
            });
        }
        if position != self.revealed {
            return Err(LearnerError::OutOfIsotonicOrder {
                expected: self.revealed,
                got: position,
            });
        }
        isotonic_minimax_prediction(self.last_label, self.horizon - self.revealed, &self.values)
    }

    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        if position != self.revealed {
            return Err(LearnerError::OutOfIsotonicOrder {
                expected: self.revealed,
                got: position,
            });
        }
        self.last_label = label;
        self.revealed += 1;
        Ok(())
    }

    fn regret_bound(&self, noise_free: bool, isotonic_order: bool) -> Option<f64> {
        (noise_free && isotonic_order).then(|| self.values[self.horizon])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn anyorder_values_frozen() {
        let v = anyorder_minimax_values(4);
        assert_abs_diff_eq!(v[0], 0.0);
        assert_abs_diff_eq!(v[1], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(v[2], 25.0 / 64.0, epsilon = 1e-15);
        // max(7921/16384, 1/2) = 1/2
        assert_abs_diff_eq!(v[3], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn anyorder_values_bounded_by_quarter_log() {
        let v = anyorder_minimax_values(256);
        for (n, &value) in v.iter().enumerate() {
            assert!(
                value <= 0.25 * ((n + 1) as f64).log2() + 1e-12,
                "n={n}: {value}"
            );
        }
    }

    #[test]
    fn combine_is_monotone_in_both_arguments() {
        let v = anyorder_minimax_values(64);
        let eps = 1e-6;
        for n in 0..64 {
            for k in 0..=n {
                let (a, b) = (v[k], v[n - k]);
                assert!(combine(a + eps, b) >= combine(a, b) - 1e-12);
                assert!(combine(a, b + eps) >= combine(a, b) - 1e-12);
            }
        }
    }

    #[test]
    fn isotonic_values_frozen() {
        let v = isotonic_minimax_values(4);
        assert_abs_diff_eq!(v[1], 0.25);
        assert_abs_diff_eq!(v[2], 25.0 / 64.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[3], (89.0f64 / 128.0).powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(v[4], (24305.0f64 / 32768.0).powi(2), epsilon = 1e-15);
    }

    #[test]
    fn isotonic_values_bounded_and_monotone() {
        let v = isotonic_minimax_values(1_000_000);
        let mut prev = 0.0;
        for (n, &a) in v.iter().enumerate().skip(1) {
            assert!(a <= 1.0, "n={n}");
            assert!(a >= prev, "n={n}");
            prev = a;
        }
    }

    #[test]
    fn anyorder_fresh_predictions() {
        let mut single = MinimaxAnyOrder::new(1);
        assert_abs_diff_eq!(single.predict(0).unwrap(), 0.5, epsilon = 1e-15);

        let mut three = MinimaxAnyOrder::new(3);
        // equal left/right coefficients collapse to the midpoint
        assert_abs_diff_eq!(three.predict(1).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn anyorder_asymmetric_prediction_shades_toward_the_larger_side() {
        // fresh pair: querying the left point leaves one unknown above it,
        // so the prediction sits below the midpoint (and mirrors on the
        // right point); it matches the left-to-right opening move
        let mut pair = MinimaxAnyOrder::new(2);
        assert_abs_diff_eq!(pair.predict(0).unwrap(), 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.predict(1).unwrap(), 0.625, epsilon = 1e-15);
        let iso = MinimaxIsotonic::new(2);
        let mut iso = iso;
        assert_abs_diff_eq!(
            pair.predict(0).unwrap(),
            iso.predict(0).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn anyorder_segments_split_and_bound_labels() {
        let mut learner = MinimaxAnyOrder::new(5);
        learner.observe(2, 0.4).unwrap();
        assert_eq!(learner.feasible_range(0), Some((0.0, 0.4)));
        assert_eq!(learner.feasible_range(4), Some((0.4, 1.0)));
        assert!(learner.feasible_range(2).is_none());
        assert!(matches!(
            learner.observe(0, 0.7),
            Err(LearnerError::NoiseFreeViolation { .. })
        ));
        // boundary labels are accepted (closed interval)
        learner.observe(0, 0.4).unwrap();
        assert_eq!(learner.feasible_range(1), Some((0.4, 0.4)));
        assert_abs_diff_eq!(learner.predict(1).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn anyorder_rejects_repeats() {
        let mut learner = MinimaxAnyOrder::new(2);
        learner.observe(0, 0.0).unwrap();
        assert!(matches!(
            learner.predict(0),
            Err(LearnerError::AlreadyLabeled(0))
        ));
        assert!(matches!(
            learner.observe(0, 0.0),
            Err(LearnerError::AlreadyLabeled(0))
        ));
    }

    #[test]
    fn isotonic_predictions_frozen() {
        // first trial of horizon 2: 1/2 - a_1/2 = 0.375
        let mut learner = MinimaxIsotonic::new(2);
        assert_abs_diff_eq!(learner.predict(0).unwrap(), 0.375, epsilon = 1e-15);
        learner.observe(0, 1.0).unwrap();
        // last trial: (c+1)/2
        assert_abs_diff_eq!(learner.predict(1).unwrap(), 1.0, epsilon = 1e-15);

        let values = isotonic_minimax_values(10);
        // once the last label hits 1 only the constant-1 continuation remains
        for n in 1..=10 {
            assert_abs_diff_eq!(
                isotonic_minimax_prediction(1.0, n, &values).unwrap(),
                1.0,
                epsilon = 1e-15
            );
        }
        assert!(isotonic_minimax_prediction(0.5, 0, &values).is_err());
    }

    #[test]
    fn isotonic_requires_left_to_right_calls() {
        let mut learner = MinimaxIsotonic::new(3);
        assert!(matches!(
            learner.predict(1),
            Err(LearnerError::OutOfIsotonicOrder { .. })
        ));
        learner.predict(0).unwrap();
        learner.observe(0, 0.2).unwrap();
        assert!(matches!(
            learner.observe(2, 0.3),
            Err(LearnerError::OutOfIsotonicOrder { .. })
        ));
    }
}
