//! Covering-net combinatorics: net sizes, grid-size tuning, and the
//! worst-case regret guarantees of the net forecasters.
//!
//! The net `F_K` holds every monotone sequence taking values on a
//! (K+1)-point grid; its size is `C(T+K, K)`.  All logarithms in the
//! tuning formulas and bounds are natural.

use num_bigint::BigUint;
use num_traits::One;

/// Exact binomial coefficient `C(n, r)`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    let r = r.min(n - r.min(n));
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(n, r)` as a float, for weight-table arithmetic where exactness below
/// 2^53 suffices.
pub fn binomial_f64(n: usize, r: usize) -> f64 {
    let r = r.min(n - r.min(n));
    let mut acc = 1.0;
    for i in 0..r {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Number of monotone sequences of length `t` on a grid with `k` steps
/// (k+1 levels): `C(t+k, k)`, computed exactly.
pub fn covering_net_size(t: usize, k: usize) -> BigUint {
    assert!(t >= 1, "horizon must be positive");
    binomial((t + k) as u64, k as u64)
}

/// Grid-step count minimizing the squared-loss regret guarantee:
/// `ceil((T / (4 ln(T+1)))^(1/3))`, at least 1.
pub fn tune_k_squared(t: usize) -> usize {
    assert!(t >= 1, "horizon must be positive");
    let x = (t as f64 / (4.0 * ((t + 1) as f64).ln())).powf(1.0 / 3.0);
    (x.ceil() as usize).max(1)
}

/// Grid-step count for the entropic-loss forecaster on the arcsine grid:
/// `ceil((2 (2 - sqrt 2) pi^2 T / ln(T+1))^(1/3))`.
pub fn tune_k_entropic(t: usize) -> usize {
    assert!(t >= 1, "horizon must be positive");
    let c = 2.0 * (2.0 - 2f64.sqrt()) * std::f64::consts::PI.powi(2);
    let x = (c * t as f64 / ((t + 1) as f64).ln()).powf(1.0 / 3.0);
    (x.ceil() as usize).max(1)
}

/// Worst-case regret guarantee of the squared-loss net forecaster with the
/// default grid size: `3/2^(2/3) T^(1/3) ln(T+1)^(2/3) + 2 ln(T+1)`.
pub fn squared_net_regret_bound(t: usize) -> f64 {
    let l = ((t + 1) as f64).ln();
    3.0 / 2f64.powf(2.0 / 3.0) * (t as f64).powf(1.0 / 3.0) * l.powf(2.0 / 3.0) + 2.0 * l
}

/// Worst-case regret guarantee of the entropic-loss net forecaster with the
/// default arcsine grid:
/// `3 (2 - sqrt 2)^(1/3) pi^(2/3) / 2^(2/3) T^(1/3) ln(T+1)^(2/3) + 2 ln(T+1)`.
pub fn entropic_net_regret_bound(t: usize) -> f64 {
    let l = ((t + 1) as f64).ln();
    let lead = 3.0 * (2.0 - 2f64.sqrt()).powf(1.0 / 3.0) * std::f64::consts::PI.powf(2.0 / 3.0)
        / 2f64.powf(2.0 / 3.0);
    lead * (t as f64).powf(1.0 / 3.0) * l.powf(2.0 / 3.0) + 2.0 * l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruteforce;

    #[test]
    fn net_size_frozen_values() {
        // K=1 net on 3 points: 0 0 0, 0 0 1, 0 1 1, 1 1 1
        assert_eq!(covering_net_size(3, 1), 4u32.into());
        assert_eq!(covering_net_size(7, 0), 1u32.into());
        // all 0 <= k_1 <= k_2 <= 2
        assert_eq!(covering_net_size(2, 2), 6u32.into());
    }

    #[test]
    fn net_size_matches_enumeration() {
        for t in 1..=8 {
            for k in 0..=4 {
                let counted = bruteforce::count_isotonic_grid(t, k + 1);
                assert_eq!(
                    covering_net_size(t, k),
                    BigUint::from(counted),
                    "t={t} k={k}"
                );
            }
        }
    }

    #[test]
    fn squared_tuning_frozen_values() {
        // (1000 / (4 ln 1001))^(1/3) = 3.307..., (1 / (4 ln 2))^(1/3) = 0.712...,
        // (8 / (4 ln 9))^(1/3) = 0.969...
        assert_eq!(tune_k_squared(1000), 4);
        assert_eq!(tune_k_squared(1), 1);
        assert_eq!(tune_k_squared(8), 1);
    }

    #[test]
    fn entropic_tuning_frozen_and_monotone() {
        // (2 (2 - sqrt 2) pi^2 / ln 2)^(1/3) = 2.554...
        assert_eq!(tune_k_entropic(1), 3);
        // (11562.95... / ln 1001)^(1/3) = 11.868...
        assert_eq!(tune_k_entropic(1000), 12);
        let mut prev = tune_k_entropic(3);
        for t in 4..=10_000 {
            let k = tune_k_entropic(t);
            assert!(k >= prev, "tuning not monotone at t={t}");
            prev = k;
        }
    }

    #[test]
    fn binomial_f64_tracks_exact() {
        for n in 0..=60usize {
            for r in 0..=n.min(10) {
                let exact: BigUint = binomial(n as u64, r as u64);
                let approx = binomial_f64(n, r);
                let exact_f = exact.to_string().parse::<f64>().unwrap();
                assert!(
                    (approx - exact_f).abs() <= 1e-9 * exact_f.max(1.0),
                    "C({n},{r})"
                );
            }
        }
    }
}
