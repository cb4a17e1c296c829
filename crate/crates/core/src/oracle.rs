//! Offline comparator computation: pool-adjacent-violators regression,
//! the L1 isotonic fit, and Euclidean projection onto the monotone box.
//!
//! The weighted PAVA fit is the unique minimizer of the weighted squared
//! error over non-decreasing sequences.  Two structural facts are relied
//! on throughout: the fit is piecewise constant, and on each maximal
//! constant block its value equals the weighted mean of the labels there.
//! The same fit also minimizes any Bregman-divergence total (entropic
//! loss in particular), which is how the entropic comparator is scored.

use thiserror::Error;

use crate::loss::{loss, LossError, LossKind};
use crate::types::IsotonicFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("input must be non-empty")]
    Empty,
    #[error("labels and weights differ in length: {labels} vs {weights}")]
    LengthMismatch { labels: usize, weights: usize },
    #[error("weight {weight} at position {position} is not positive")]
    NonpositiveWeight { position: usize, weight: f64 },
    #[error(transparent)]
    Loss(#[from] LossError),
}

/// Maximal block on which a fit is constant; `end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSet {
    pub start: usize,
    pub end: usize,
    pub value: f64,
}

/// Result of a pool-adjacent-violators run. `values` may exceed `[0, 1]`
/// when the inputs do; callers wanting the box apply [`project_isotonic_box`].
#[derive(Debug, Clone, PartialEq)]
pub struct PavaFit {
    values: Vec<f64>,
    level_sets: Vec<LevelSet>,
}

impl PavaFit {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn level_sets(&self) -> &[LevelSet] {
        &self.level_sets
    }
}

/// Weighted isotonic regression under squared error, single left-to-right
/// pass with a back-merging stack; O(T) amortized.
pub fn pava(labels: &[f64], weights: &[f64]) -> Result<PavaFit, OracleError> {
    if labels.is_empty() {
        return Err(OracleError::Empty);
    }
    if labels.len() != weights.len() {
        return Err(OracleError::LengthMismatch {
            labels: labels.len(),
            weights: weights.len(),
        });
    }
    for (i, &w) in weights.iter().enumerate() {
        if !(w > 0.0) {
            return Err(OracleError::NonpositiveWeight {
                position: i,
                weight: w,
            });
        }
    }

    struct Block {
        value: f64,
        weight: f64,
        count: usize,
    }
    let mut stack: Vec<Block> = Vec::with_capacity(labels.len());
    for (&y, &w) in labels.iter().zip(weights) {
        stack.push(Block {
            value: y,
            weight: w,
            count: 1,
        });
        while stack.len() >= 2 && stack[stack.len() - 2].value > stack[stack.len() - 1].value {
            let top = stack.pop().unwrap();
            let prev = stack.last_mut().unwrap();
            let w_total = prev.weight + top.weight;
            prev.value = (prev.weight * prev.value + top.weight * top.value) / w_total;
            prev.weight = w_total;
            prev.count += top.count;
        }
    }

    let mut values = Vec::with_capacity(labels.len());
    let mut level_sets: Vec<LevelSet> = Vec::new();
    let mut pos = 0;
    for block in &stack {
        let start = pos;
        for _ in 0..block.count {
            values.push(block.value);
        }
        pos += block.count;
        // adjacent pooled blocks may coincide in value; a level set is maximal
        match level_sets.last_mut() {
            Some(last) if last.value == block.value => last.end = pos,
            _ => level_sets.push(LevelSet {
                start,
                end: pos,
                value: block.value,
            }),
        }
    }
    Ok(PavaFit { values, level_sets })
}

/// Unit-weight isotonic regression.
pub fn pava_unit(labels: &[f64]) -> Result<PavaFit, OracleError> {
    pava(labels, &vec![1.0; labels.len()])
}

/// Loss of the best comparator in hindsight, given the full label sequence
/// in position order.  Squared and entropic losses share the PAVA fit (the
/// minimizer is the same for every Bregman divergence); absolute loss uses
/// the L1 isotonic fit.
pub fn best_isotonic_loss(labels: &[f64], kind: LossKind) -> Result<f64, OracleError> {
    if labels.is_empty() {
        return Err(OracleError::Empty);
    }
    match kind {
        LossKind::Squared | LossKind::Entropic => {
            let fit = pava_unit(labels)?;
            let mut total = 0.0;
            for (&y, &p) in labels.iter().zip(fit.values()) {
                total += loss(kind, y, p)?;
            }
            Ok(total)
        }
        LossKind::Absolute => {
            let fit = l1_isotonic(labels)?;
            Ok(labels
                .iter()
                .zip(fit.values())
                .map(|(&y, &p)| (y - p).abs())
                .sum())
        }
    }
}

/// A minimizer of total absolute error over non-decreasing sequences,
/// computed by dynamic programming over the distinct label values (an
/// optimal fit always exists on that candidate set).  Ties are broken
/// toward the smallest optimal value per position, back to front, so the
/// output is deterministic.
///
/// Memory stays `O(m sqrt(T))` via checkpointing of the DP rows.
pub fn l1_isotonic(labels: &[f64]) -> Result<IsotonicFunction, OracleError> {
    let t = labels.len();
    if t == 0 {
        return Err(OracleError::Empty);
    }
    let mut candidates = labels.to_vec();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();
    let m = candidates.len();

    // dp_t[j]: best cost of the first t labels with the fit ending at
    // candidate j.  prefix-min converts each row to the next in O(m).
    let step = |row: &[f64], y: f64, out: &mut Vec<f64>| {
        out.clear();
        let mut best = f64::INFINITY;
        for (j, &c) in candidates.iter().enumerate() {
            best = best.min(row[j]);
            out.push(best + (y - c).abs());
        }
    };

    let block = (t as f64).sqrt().ceil() as usize;
    let mut checkpoints: Vec<Vec<f64>> = Vec::with_capacity(t / block + 2);
    let mut row = vec![0.0; m];
    checkpoints.push(row.clone());
    let mut next = Vec::with_capacity(m);
    for (i, &y) in labels.iter().enumerate() {
        step(&row, y, &mut next);
        std::mem::swap(&mut row, &mut next);
        if (i + 1) % block == 0 {
            checkpoints.push(row.clone());
        }
    }

    // smallest argmin of the final row
    let mut choice = vec![0usize; t];
    let pick_min = |row: &[f64], upto: usize| {
        let mut arg = 0;
        let mut best = f64::INFINITY;
        for (j, &v) in row.iter().enumerate().take(upto + 1) {
            if v < best {
                best = v;
                arg = j;
            }
        }
        arg
    };
    choice[t - 1] = pick_min(&row, m - 1);

    // walk back one checkpointed segment at a time, rebuilding its rows
    let mut segment_rows: Vec<Vec<f64>> = Vec::with_capacity(block);
    let mut seg_end = t - 1; // positions seg_start..seg_end still need choices
    while seg_end > 0 {
        let seg_start = (seg_end - 1) / block * block;
        let mut cur = checkpoints[seg_start / block].clone();
        segment_rows.clear();
        for &y in &labels[seg_start..seg_end] {
            segment_rows.push(cur.clone());
            step(&cur, y, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        // segment_rows[i] is the dp row over the first seg_start + i labels.
        for pos in (seg_start..seg_end).rev() {
            // choice[pos] is the smallest argmin <= choice[pos + 1] of the
            // row over the first pos + 1 labels.
            let prev_row = &segment_rows[pos - seg_start];
            let upper = choice[pos + 1];
            let mut arg = 0;
            let mut best = f64::INFINITY;
            let mut running = f64::INFINITY;
            for j in 0..=upper {
                running = running.min(prev_row[j]);
                let v = running + (labels[pos] - candidates[j]).abs();
                if v < best {
                    best = v;
                    arg = j;
                }
            }
            choice[pos] = arg;
        }
        seg_end = seg_start;
    }

    let values: Vec<f64> = choice.iter().map(|&j| candidates[j]).collect();
    Ok(IsotonicFunction::new(values)
        .expect("choices are monotone and candidates are drawn from [0, 1] labels"))
}

/// Euclidean projection onto `{0 <= f_1 <= ... <= f_T <= 1}`: unit-weight
/// PAVA followed by clipping to `[0, 1]`.  Clipping after pooling is exact
/// because the box constraint separates from the chain constraint.
pub fn project_isotonic_box(point: &[f64]) -> IsotonicFunction {
    if point.is_empty() {
        return IsotonicFunction::new(Vec::new()).unwrap();
    }
    let fit = pava_unit(point).expect("non-empty input");
    let clipped: Vec<f64> = fit.values().iter().map(|v| v.clamp(0.0, 1.0)).collect();
    IsotonicFunction::new(clipped).expect("pooled and clipped values are monotone in [0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruteforce;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn total_sq(labels: &[f64], fit: &[f64]) -> f64 {
        labels
            .iter()
            .zip(fit)
            .map(|(&y, &p)| (y - p) * (y - p))
            .sum()
    }

    #[test]
    fn pava_frozen_examples() {
        let fit = pava_unit(&[1.0, 0.0]).unwrap();
        assert_eq!(fit.values(), &[0.5, 0.5]);

        let fit = pava_unit(&[0.0, 1.0]).unwrap();
        assert_eq!(fit.values(), &[0.0, 1.0]);

        let fit = pava_unit(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(fit.values(), &[0.5, 0.5, 1.0]);
        assert_eq!(fit.level_sets().len(), 2);
    }

    #[test]
    fn pava_rejects_bad_input() {
        assert!(matches!(pava_unit(&[]), Err(OracleError::Empty)));
        assert!(matches!(
            pava(&[0.5], &[0.0]),
            Err(OracleError::NonpositiveWeight { .. })
        ));
        assert!(matches!(
            pava(&[0.5, 0.2], &[1.0]),
            Err(OracleError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn best_isotonic_frozen_examples() {
        // fit (0, 0.5, 0.5, 1), loss 0.5 — checked against the grid oracle below
        let l = best_isotonic_loss(&[0.0, 1.0, 0.0, 1.0], LossKind::Squared).unwrap();
        assert_abs_diff_eq!(l, 0.5, epsilon = 1e-12);

        for kind in [LossKind::Squared, LossKind::Absolute] {
            let l = best_isotonic_loss(&[0.1, 0.2, 0.9], kind).unwrap();
            assert_abs_diff_eq!(l, 0.0, epsilon = 1e-15);
        }

        // isotonic labels: entropic comparator loss is the entropy of the labels
        let labels = [0.25, 0.75];
        let expect: f64 = labels
            .iter()
            .map(|&y| loss(LossKind::Entropic, y, y).unwrap())
            .sum();
        let l = best_isotonic_loss(&labels, LossKind::Entropic).unwrap();
        assert_abs_diff_eq!(l, expect, epsilon = 1e-12);
    }

    #[test]
    fn l1_frozen_examples() {
        assert_eq!(
            l1_isotonic(&[1.0, 0.0, 0.0]).unwrap().values(),
            &[0.0, 0.0, 0.0]
        );
        assert_eq!(l1_isotonic(&[0.0, 1.0]).unwrap().values(), &[0.0, 1.0]);
        // every constant ties at total loss 1; smallest optimal value wins
        assert_eq!(l1_isotonic(&[1.0, 0.0]).unwrap().values(), &[0.0, 0.0]);
    }

    #[test]
    fn l1_matches_exhaustive_small() {
        let levels = [0.0, 0.5, 1.0];
        for t in 1..=6usize {
            // all 3^t label sequences, decoded base-3
            for code in 0..3usize.pow(t as u32) {
                let mut c = code;
                let labels: Vec<f64> = (0..t)
                    .map(|_| {
                        let v = levels[c % 3];
                        c /= 3;
                        v
                    })
                    .collect();
                let fit = l1_isotonic(&labels).unwrap();
                let got: f64 = labels
                    .iter()
                    .zip(fit.values())
                    .map(|(&y, &p)| (y - p).abs())
                    .sum();
                let want =
                    bruteforce::min_isotonic_loss_on_grid(&labels, LossKind::Absolute, &levels);
                assert!(
                    (got - want).abs() <= 1e-12,
                    "labels {labels:?}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn l1_checkpointing_consistent_at_larger_sizes() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for t in [17usize, 64, 200] {
            let labels: Vec<f64> = (0..t).map(|_| rng.gen::<f64>()).collect();
            let fit = l1_isotonic(&labels).unwrap();
            let got: f64 = labels
                .iter()
                .zip(fit.values())
                .map(|(&y, &p)| (y - p).abs())
                .sum();
            // quadratic-memory reference DP on the same candidate set
            let mut cands = labels.clone();
            cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cands.dedup();
            let mut row = vec![0.0; cands.len()];
            for &y in &labels {
                let mut best = f64::INFINITY;
                let mut next = Vec::with_capacity(cands.len());
                for (j, &c) in cands.iter().enumerate() {
                    best = best.min(row[j]);
                    next.push(best + (y - c).abs());
                }
                row = next;
            }
            let want = row.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((got - want).abs() <= 1e-9, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn projection_frozen_examples() {
        assert_eq!(
            project_isotonic_box(&[0.5, 0.2]).values(),
            &[0.35, 0.35]
        );
        assert_eq!(project_isotonic_box(&[-1.0, 2.0]).values(), &[0.0, 1.0]);
        let inside = [0.1, 0.4, 0.4, 0.9];
        assert_eq!(project_isotonic_box(&inside).values(), &inside);
    }

    #[test]
    fn level_set_means_hold_on_random_instances() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let t = rng.gen_range(1..=50);
            let labels: Vec<f64> = (0..t).map(|_| rng.gen::<f64>()).collect();
            let weights: Vec<f64> = (0..t).map(|_| rng.gen::<f64>() + 0.05).collect();
            let fit = pava(&labels, &weights).unwrap();
            assert!(fit.values().windows(2).all(|w| w[0] <= w[1]));
            for set in fit.level_sets() {
                let w_total: f64 = weights[set.start..set.end].iter().sum();
                let mean: f64 = labels[set.start..set.end]
                    .iter()
                    .zip(&weights[set.start..set.end])
                    .map(|(&y, &w)| w * y)
                    .sum::<f64>()
                    / w_total;
                assert!(
                    (mean - set.value).abs() <= 1e-12,
                    "level set mean {mean} vs value {}",
                    set.value
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// The fit beats every member of a dense monotone grid.
        #[test]
        fn pava_optimal_against_grid(labels in proptest::collection::vec(0.0..=1.0f64, 1..=6)) {
            let fit = pava_unit(&labels).unwrap();
            let mine = total_sq(&labels, fit.values());
            let levels = bruteforce::uniform_levels(0.05);
            let grid_best = bruteforce::min_isotonic_loss_on_grid(&labels, LossKind::Squared, &levels);
            prop_assert!(mine <= grid_best + 1e-12);
        }

        /// The same fit minimizes entropic loss over the grid too.
        #[test]
        fn bregman_invariance(labels in proptest::collection::vec(0.05..=0.95f64, 1..=6)) {
            let fit = pava_unit(&labels).unwrap();
            let mine: f64 = labels
                .iter()
                .zip(fit.values())
                .map(|(&y, &p)| loss(LossKind::Entropic, y, p).unwrap())
                .sum();
            let levels: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
            let grid_best = bruteforce::min_isotonic_loss_on_grid(&labels, LossKind::Entropic, &levels);
            prop_assert!(mine <= grid_best + 1e-12);
        }

        /// Projection really is the nearest point of the monotone box.
        #[test]
        fn projection_is_nearest(point in proptest::collection::vec(-0.5..=1.5f64, 1..=6)) {
            let proj = project_isotonic_box(&point);
            let mine: f64 = point
                .iter()
                .zip(proj.values())
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            let levels = bruteforce::uniform_levels(0.05);
            let grid_best = bruteforce::nearest_isotonic_distance_on_grid(&point, &levels);
            prop_assert!(mine <= grid_best + 1e-9);
        }

        /// L1 fit loss never beats the candidate-set optimum (and vice versa).
        #[test]
        fn l1_loss_is_optimal(labels in proptest::collection::vec(0.0..=1.0f64, 1..=6)) {
            let fit = l1_isotonic(&labels).unwrap();
            let mine: f64 = labels
                .iter()
                .zip(fit.values())
                .map(|(&y, &p)| (y - p).abs())
                .sum();
            let mut cands = labels.clone();
            cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cands.dedup();
            let best = bruteforce::min_isotonic_loss_on_grid(&labels, LossKind::Absolute, &cands);
            prop_assert!((mine - best).abs() <= 1e-12);
        }
    }
}
