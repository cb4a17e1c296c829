//! Exponential weights over a covering net of grid-valued monotone
//! sequences, with three interchangeable evaluation paths:
//!
//! - [`EwNet`]: dynamic programming in O(TK) per prediction for arbitrary
//!   reveal orders,
//! - [`EwNetIsotonic`]: O(K) per round when positions arrive left to
//!   right, using closed-form suffix counts,
//! - [`EwNetNaive`]: full enumeration of the net, the equivalence oracle
//!   for both of the above.
//!
//! Every net member `f` carries weight `exp(-eta * cumulative loss of f)`
//! and the prediction at a position is the weight-averaged grid value
//! there.  The DP factorizes that average through per-position,
//! per-level update factors `beta[s][j] = exp(-eta * l(y_s, z_j))`, kept
//! at 1 while position `s` is unlabeled: a forward sweep accumulates
//! weight over monotone prefixes ending at each level, a backward sweep
//! over suffixes, and the prediction is a ratio of grid-weighted sums of
//! their products.  Each sweep renormalizes by its running maximum
//! (tracked in log space) so horizons in the thousands cannot underflow;
//! the factor cancels in the ratio.

use crate::loss::{loss, LossKind};
use crate::net::{self, binomial_f64, covering_net_size};

use super::{LearnerError, OnlineLearner};

const NAIVE_NET_LIMIT: u64 = 1_000_000;

/// Uniform grid `j/k` for `j = 0..=k`.
pub fn squared_grid(k: usize) -> Vec<f64> {
    assert!(k >= 1, "grid needs at least one step");
    (0..=k).map(|j| j as f64 / k as f64).collect()
}

/// Arcsine-spaced grid for entropic loss: `sin^2` of near-uniform angles
/// with the two endpoints pulled inward, strictly inside `(0, 1)`.  `k = 1`
/// degenerates to two equal midpoints and is rejected by the learner.
pub fn entropic_grid(k: usize) -> Vec<f64> {
    assert!(k >= 1, "grid needs at least one step");
    let pi = std::f64::consts::PI;
    (0..=k)
        .map(|j| {
            let angle = if j == 0 {
                pi / (4.0 * k as f64)
            } else if j == k {
                pi / 2.0 - pi / (4.0 * k as f64)
            } else {
                pi * j as f64 / (2.0 * k as f64)
            };
            angle.sin().powi(2)
        })
        .collect()
}

fn default_eta(kind: LossKind) -> f64 {
    match kind {
        // squared loss is 1/2-exp-concave on [0,1]; entropic is 1-exp-concave
        LossKind::Squared => 0.5,
        LossKind::Entropic => 1.0,
        LossKind::Absolute => unreachable!("net forecaster does not play absolute loss"),
    }
}

fn check_position(position: usize, horizon: usize) -> Result<(), LearnerError> {
    if position >= horizon {
        Err(LearnerError::OutOfRange { position, horizon })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// O(TK) dynamic program
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EwNet {
    horizon: usize,
    kind: LossKind,
    grid: Vec<f64>,
    eta: f64,
    /// Row-major `horizon x (k+1)`; all-ones row while the position is
    /// unlabeled.
    beta: Vec<f64>,
    labeled: Vec<bool>,
    default_tuning: bool,
}

impl EwNet {
    /// Squared-loss forecaster on the uniform grid; `k = None` applies the
    /// default horizon-based tuning.
    pub fn squared(horizon: usize, k: Option<usize>) -> Result<Self, LearnerError> {
        if horizon == 0 {
            return Err(LearnerError::InvalidParameter("horizon must be positive".into()));
        }
        let default_tuning = k.is_none();
        let k = k.unwrap_or_else(|| net::tune_k_squared(horizon));
        if k == 0 {
            return Err(LearnerError::InvalidParameter("k must be positive".into()));
        }
        Ok(Self::with_grid(
            horizon,
            LossKind::Squared,
            squared_grid(k),
            default_tuning,
        ))
    }

    /// Entropic-loss forecaster on the arcsine grid; needs `k >= 2` (the
    /// grid collapses at `k = 1`).
    pub fn entropic(horizon: usize, k: Option<usize>) -> Result<Self, LearnerError> {
        if horizon == 0 {
            return Err(LearnerError::InvalidParameter("horizon must be positive".into()));
        }
        let default_tuning = k.is_none();
        let k = k.unwrap_or_else(|| net::tune_k_entropic(horizon).max(2));
        if k < 2 {
            return Err(LearnerError::InvalidParameter(
                "entropic grid needs k >= 2".into(),
            ));
        }
        Ok(Self::with_grid(
            horizon,
            LossKind::Entropic,
            entropic_grid(k),
            default_tuning,
        ))
    }

    fn with_grid(horizon: usize, kind: LossKind, grid: Vec<f64>, default_tuning: bool) -> Self {
        let levels = grid.len();
        Self {
            horizon,
            kind,
            grid,
            eta: default_eta(kind),
            beta: vec![1.0; horizon * levels],
            labeled: vec![false; horizon],
            default_tuning,
        }
    }

    /// Override the learning rate (experiments only; voids the bound).
    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self.default_tuning = false;
        self
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Number of grid steps K.
    pub fn grid_steps(&self) -> usize {
        self.grid.len() - 1
    }

    fn beta_row(&self, position: usize) -> &[f64] {
        let levels = self.grid.len();
        &self.beta[position * levels..(position + 1) * levels]
    }

    /// The exponentially weighted average prediction at `position`,
    /// computed by the forward/backward sweeps.  Does not mutate state.
    pub fn predict_at(&self, position: usize) -> Result<f64, LearnerError> {
        check_position(position, self.horizon)?;
        if self.labeled[position] {
            return Err(LearnerError::AlreadyLabeled(position));
        }
        let levels = self.grid.len();

        // forward[k]: weight of monotone prefixes ending at level k of the
        // queried position (labels strictly left included)
        let mut forward = vec![1.0; levels];
        let mut buf = vec![0.0; levels];
        for s in 1..=position {
            let b = self.beta_row(s - 1);
            buf[0] = b[0] * forward[0];
            for k in 1..levels {
                buf[k] = buf[k - 1] + b[k] * forward[k];
            }
            renormalize(&mut buf);
            std::mem::swap(&mut forward, &mut buf);
        }

        // backward[k]: weight of monotone suffixes starting at level k
        let mut backward = vec![1.0; levels];
        for s in (position..self.horizon - 1).rev() {
            let b = self.beta_row(s + 1);
            buf[levels - 1] = b[levels - 1] * backward[levels - 1];
            for k in (0..levels - 1).rev() {
                buf[k] = buf[k + 1] + b[k] * backward[k];
            }
            renormalize(&mut buf);
            std::mem::swap(&mut backward, &mut buf);
        }

        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..levels {
            let w = forward[k] * backward[k];
            num += self.grid[k] * w;
            den += w;
        }
        Ok(num / den)
    }

    /// Install the update factors for a freshly revealed label.
    pub fn observe_at(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        check_position(position, self.horizon)?;
        if self.labeled[position] {
            return Err(LearnerError::AlreadyLabeled(position));
        }
        let levels = self.grid.len();
        for j in 0..levels {
            let l = loss(self.kind, label, self.grid[j]).map_err(|e| {
                LearnerError::Unsupported(format!("grid level incompatible with label: {e}"))
            })?;
            self.beta[position * levels + j] = (-self.eta * l).exp();
        }
        self.labeled[position] = true;
        Ok(())
    }

    /// Multiply one stored update factor by `factor`.  Fault-injection
    /// hook for the verification harness: a corrupted factor must trip
    /// the enumeration-equivalence check.
    pub fn scale_beta_entry(&mut self, position: usize, level: usize, factor: f64) {
        let levels = self.grid.len();
        self.beta[position * levels + level] *= factor;
    }
}

fn renormalize(column: &mut [f64]) {
    let m = column.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
    for v in column.iter_mut() {
        *v /= m;
    }
}

impl OnlineLearner for EwNet {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn name(&self) -> String {
        match self.kind {
            LossKind::Entropic => format!("ew-entropic(k={})", self.grid_steps()),
            _ => format!("ew-net(k={})", self.grid_steps()),
        }
    }

    fn predict(&mut self, position: usize) -> Result<f64, LearnerError> {
        self.predict_at(position)
    }

    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        self.observe_at(position, label)
    }

    fn regret_bound(&self, _noise_free: bool, _isotonic_order: bool) -> Option<f64> {
        if !self.default_tuning {
            return None;
        }
        match self.kind {
            LossKind::Squared => Some(net::squared_net_regret_bound(self.horizon)),
            LossKind::Entropic => Some(net::entropic_net_regret_bound(self.horizon)),
            LossKind::Absolute => None,
        }
    }
}

// ---------------------------------------------------------------------------
// O(K) left-to-right fast path
// ---------------------------------------------------------------------------

/// Same forecaster, restricted to the left-to-right reveal order.  The
/// backward weights then count monotone suffix completions and have the
/// closed form `C(T-1-s + K-k, K-k)`, and the forward column only needs
/// extending by one position per round, so each round costs O(K) with no
/// dependence on the horizon.
#[derive(Debug, Clone)]
pub struct EwNetIsotonic {
    horizon: usize,
    kind: LossKind,
    grid: Vec<f64>,
    eta: f64,
    forward: Vec<f64>,
    next_position: usize,
    awaiting_label: bool,
    inner_ops: u64,
}

impl EwNetIsotonic {
    pub fn squared(horizon: usize, k: Option<usize>) -> Result<Self, LearnerError> {
        if horizon == 0 {
            return Err(LearnerError::InvalidParameter("horizon must be positive".into()));
        }
        let k = k.unwrap_or_else(|| net::tune_k_squared(horizon));
        if k == 0 {
            return Err(LearnerError::InvalidParameter("k must be positive".into()));
        }
        Ok(Self {
            horizon,
            kind: LossKind::Squared,
            grid: squared_grid(k),
            eta: default_eta(LossKind::Squared),
            forward: vec![1.0; k + 1],
            next_position: 0,
            awaiting_label: false,
            inner_ops: 0,
        })
    }

    /// Cumulative inner-loop iterations over all calls; grows by a
    /// function of K alone per round, which is what the structural
    /// cost check asserts.
    pub fn inner_ops(&self) -> u64 {
        self.inner_ops
    }

    pub fn grid_steps(&self) -> usize {
        self.grid.len() - 1
    }
}

impl OnlineLearner for EwNetIsotonic {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn name(&self) -> String {
        format!("ew-net-isotonic(k={})", self.grid_steps())
    }

    fn predict(&mut self, position: usize) -> Result<f64, LearnerError> {
        check_position(position, self.horizon)?;
        if position != self.next_position || self.awaiting_label {
            return Err(LearnerError::OutOfIsotonicOrder {
                expected: self.next_position,
                got: position,
            });
        }
        let k_steps = self.grid.len() - 1;
        let remaining = self.horizon - 1 - position;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..=k_steps {
            let suffix = binomial_f64(remaining + k_steps - k, k_steps - k);
            let w = self.forward[k] * suffix;
            num += self.grid[k] * w;
            den += w;
            self.inner_ops += 1;
        }
        self.awaiting_label = true;
        Ok(num / den)
    }

    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        check_position(position, self.horizon)?;
        if position != self.next_position || !self.awaiting_label {
            return Err(LearnerError::OutOfIsotonicOrder {
                expected: self.next_position,
                got: position,
            });
        }
        let levels = self.grid.len();
        let mut extended = vec![0.0; levels];
        for j in 0..levels {
            let l = loss(self.kind, label, self.grid[j]).map_err(|e| {
                LearnerError::Unsupported(format!("grid level incompatible with label: {e}"))
            })?;
            let b = (-self.eta * l).exp();
            extended[j] = if j == 0 {
                b * self.forward[0]
            } else {
                extended[j - 1] + b * self.forward[j]
            };
            self.inner_ops += 1;
        }
        renormalize(&mut extended);
        self.forward = extended;
        self.next_position += 1;
        self.awaiting_label = false;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Enumeration oracle
// ---------------------------------------------------------------------------

/// Exact exponentially weighted average by enumerating every net member.
/// `history` holds `(position, label)` pairs already revealed.  Guarded to
/// nets of at most one million members.
pub fn naive_net_prediction(
    grid: &[f64],
    eta: f64,
    kind: LossKind,
    horizon: usize,
    history: &[(usize, f64)],
    position: usize,
) -> Result<f64, LearnerError> {
    check_position(position, horizon)?;
    let k = grid.len() - 1;
    let size = covering_net_size(horizon, k);
    if size > NAIVE_NET_LIMIT.into() {
        return Err(LearnerError::NetTooLarge {
            size: size.to_string(),
            limit: NAIVE_NET_LIMIT,
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    crate::bruteforce::for_each_isotonic_indices(horizon, grid.len(), |member| {
        let mut total = 0.0;
        for &(s, y) in history {
            match loss(kind, y, grid[member[s]]) {
                Ok(l) => total += l,
                Err(_) => return, // infinitely penalized member carries no weight
            }
        }
        let w = (-eta * total).exp();
        num += grid[member[position]] * w;
        den += w;
    });
    if den == 0.0 {
        return Err(LearnerError::Unsupported(
            "every net member has infinite loss on the history".into(),
        ));
    }
    Ok(num / den)
}

/// The enumeration oracle wrapped in the learner contract, for running
/// whole games against it at tiny horizons.
#[derive(Debug, Clone)]
pub struct EwNetNaive {
    horizon: usize,
    kind: LossKind,
    grid: Vec<f64>,
    eta: f64,
    history: Vec<(usize, f64)>,
    labeled: Vec<bool>,
}

impl EwNetNaive {
    pub fn new(horizon: usize, kind: LossKind, k: Option<usize>) -> Result<Self, LearnerError> {
        if horizon == 0 {
            return Err(LearnerError::InvalidParameter("horizon must be positive".into()));
        }
        let grid = match kind {
            LossKind::Squared => squared_grid(k.unwrap_or_else(|| net::tune_k_squared(horizon))),
            LossKind::Entropic => {
                let k = k.unwrap_or_else(|| net::tune_k_entropic(horizon).max(2));
                if k < 2 {
                    return Err(LearnerError::InvalidParameter(
                        "entropic grid needs k >= 2".into(),
                    ));
                }
                entropic_grid(k)
            }
            LossKind::Absolute => {
                return Err(LearnerError::InvalidParameter(
                    "net forecaster does not play absolute loss".into(),
                ))
            }
        };
        let size = covering_net_size(horizon, grid.len() - 1);
        if size > NAIVE_NET_LIMIT.into() {
            return Err(LearnerError::NetTooLarge {
                size: size.to_string(),
                limit: NAIVE_NET_LIMIT,
            });
        }
        Ok(Self {
            horizon,
            kind,
            eta: default_eta(kind),
            grid,
            history: Vec::new(),
            labeled: vec![false; horizon],
        })
    }
}

impl OnlineLearner for EwNetNaive {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn name(&self) -> String {
        format!("ew-net-naive(k={})", self.grid.len() - 1)
    }

    fn predict(&mut self, position: usize) -> Result<f64, LearnerError> {
        if self.labeled[position] {
            return Err(LearnerError::AlreadyLabeled(position));
        }
        naive_net_prediction(
            &self.grid,
            self.eta,
            self.kind,
            self.horizon,
            &self.history,
            position,
        )
    }

    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        check_position(position, self.horizon)?;
        if self.labeled[position] {
            return Err(LearnerError::AlreadyLabeled(position));
        }
        self.labeled[position] = true;
        self.history.push((position, label));
        Ok(())
    }
}
