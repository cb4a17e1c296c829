//! Enumeration oracles for small instances.
//!
//! Everything here is deliberately naive: these routines spell out the
//! quantity being computed (exhaustive minimization, direct counting) so
//! the optimized implementations elsewhere can be checked against them.
//! They power the verification suite and the unit tests; horizons are
//! expected to stay in the single digits.

use crate::loss::{loss, LossKind};

/// Visit every non-decreasing assignment of `len` positions to level
/// indices `0..n_levels`.
pub fn for_each_isotonic_indices(len: usize, n_levels: usize, mut visit: impl FnMut(&[usize])) {
    if n_levels == 0 {
        return;
    }
    let mut buf = Vec::with_capacity(len);
    rec(&mut buf, len, n_levels, 0, &mut visit);

    fn rec(
        buf: &mut Vec<usize>,
        len: usize,
        n_levels: usize,
        min_level: usize,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if buf.len() == len {
            visit(buf);
            return;
        }
        for level in min_level..n_levels {
            buf.push(level);
            rec(buf, len, n_levels, level, visit);
            buf.pop();
        }
    }
}

/// Visit every non-decreasing sequence over the given (sorted) level values.
pub fn for_each_isotonic(len: usize, levels: &[f64], mut visit: impl FnMut(&[f64])) {
    let mut values = vec![0.0; len];
    for_each_isotonic_indices(len, levels.len(), |idx| {
        for (v, &j) in values.iter_mut().zip(idx) {
            *v = levels[j];
        }
        visit(&values);
    });
}

/// Count of monotone grid sequences by direct enumeration (no binomial
/// shortcut).
pub fn count_isotonic_grid(len: usize, n_levels: usize) -> u64 {
    let mut n = 0u64;
    for_each_isotonic_indices(len, n_levels, |_| n += 1);
    n
}

/// Uniform grid `0, step, 2*step, ..., 1` (inclusive of both ends).
pub fn uniform_levels(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

/// Minimum total loss over every monotone sequence on the given levels.
/// Members with infinite entropic loss are skipped.
pub fn min_isotonic_loss_on_grid(labels: &[f64], kind: LossKind, levels: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for_each_isotonic(labels.len(), levels, |f| {
        let mut total = 0.0;
        for (&y, &p) in labels.iter().zip(f) {
            match loss(kind, y, p) {
                Ok(l) => total += l,
                Err(_) => return,
            }
        }
        if total < best {
            best = total;
        }
    });
    best
}

/// Minimum weighted squared error over every monotone sequence on the levels.
pub fn min_weighted_squared_on_grid(labels: &[f64], weights: &[f64], levels: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for_each_isotonic(labels.len(), levels, |f| {
        let total: f64 = labels
            .iter()
            .zip(weights)
            .zip(f)
            .map(|((&y, &w), &p)| w * (y - p) * (y - p))
            .sum();
        if total < best {
            best = total;
        }
    });
    best
}

/// Squared distance from `point` to the nearest monotone sequence on the
/// levels.
pub fn nearest_isotonic_distance_on_grid(point: &[f64], levels: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for_each_isotonic(point.len(), levels, |f| {
        let d: f64 = point.iter().zip(f).map(|(&a, &b)| (a - b) * (a - b)).sum();
        if d < best {
            best = d;
        }
    });
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_tiny_nets() {
        // 2 positions, 3 levels: C(4, 2) = 6
        assert_eq!(count_isotonic_grid(2, 3), 6);
        assert_eq!(count_isotonic_grid(3, 2), 4);
        assert_eq!(count_isotonic_grid(5, 1), 1);
    }

    #[test]
    fn enumerates_in_order() {
        let mut seen = Vec::new();
        for_each_isotonic(2, &[0.0, 1.0], |f| seen.push(f.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]
        );
    }
}
