//! Exponential weights with the uniform prior over the whole (continuous)
//! comparator class, evaluated through its closed-form marginal.
//!
//! The closed form exists only for the demonstration scenario this
//! learner is kept around for: labels revealed left to right, all zeros
//! so far.  There the posterior marginal of the current coordinate is
//! proportional to `(1-z)^(T-t) * (G(z))^(t-1)`, where `G` is the
//! antiderivative of the Gaussian kernel, and the prediction is its mean.
//! Any other scenario is rejected.  The point of the learner is that this
//! prediction stays boundedly far from zero through the second half of
//! the game, so the total loss grows linearly.

use super::{LearnerError, OnlineLearner};

/// `G(z) = integral_0^z exp(-x^2/2) dx`.
fn gauss_antiderivative(z: f64) -> f64 {
    (std::f64::consts::PI / 2.0).sqrt() * libm::erf(z / std::f64::consts::SQRT_2)
}

/// Log of the unnormalized marginal density at `z` for 1-based `trial` of
/// `horizon`.  The zero-exponent cases are special-cased so `0 * -inf`
/// never produces a NaN at the endpoints.
fn log_density(z: f64, trial: usize, horizon: usize) -> f64 {
    let mut g = 0.0;
    if horizon > trial {
        g += (horizon - trial) as f64 * (1.0 - z).ln();
    }
    if trial > 1 {
        g += (trial - 1) as f64 * gauss_antiderivative(z).ln();
    }
    g
}

fn simpson(h: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(m - a, fa, flm, fm);
    let right = simpson(b - m, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature over `[0, 1]` to absolute tolerance `tol`,
/// seeded with a uniform partition so narrow peaks are not missed.
fn integrate_unit(f: &impl Fn(f64) -> f64, tol: f64) -> f64 {
    const PANELS: usize = 64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let a = i as f64 / PANELS as f64;
        let b = (i + 1) as f64 / PANELS as f64;
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = simpson(b - a, fa, fm, fb);
        total += adaptive(f, a, b, fa, fm, fb, whole, tol / PANELS as f64, 48);
    }
    total
}

/// Mean of the posterior marginal at 1-based `trial` in the all-zeros
/// left-to-right scenario: the exponential-weights prediction there.
/// Integrals are evaluated on the max-shifted log density to tolerance
/// 1e-12, well inside the 1e-10 the callers rely on.
pub fn marginal_mean(trial: usize, horizon: usize) -> Result<f64, LearnerError> {
    if trial < 1 || trial > horizon {
        return Err(LearnerError::OutOfRange {
            position: trial,
            horizon,
        });
    }
    // the log density is strictly concave; a fine scan pins the max well
    // enough for exponent shifting
    let mut g_max = f64::NEG_INFINITY;
    const SCAN: usize = 4096;
    for i in 0..=SCAN {
        let z = i as f64 / SCAN as f64;
        g_max = g_max.max(log_density(z, trial, horizon));
    }
    let density = |z: f64| (log_density(z, trial, horizon) - g_max).exp();
    let numerator = integrate_unit(&|z| z * density(z), 1e-12);
    let denominator = integrate_unit(&density, 1e-12);
    Ok((numerator / denominator).clamp(0.0, 1.0))
}

#[derive(Debug, Clone)]
pub struct ContinuousEw {
    horizon: usize,
    revealed: usize,
    awaiting_label: bool,
}

impl ContinuousEw {
    pub fn new(horizon: usize) -> Self {
        Self {
            horizon,
            revealed: 0,
            awaiting_label: false,
        }
    }
}

impl OnlineLearner for ContinuousEw {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn name(&self) -> String {
        "continuous-ew".into()
    }

    fn predict(&mut self, position: usize) -> Result<f64, LearnerError> {
        if position >= self.horizon {
            return Err(LearnerError::OutOfRange {
                position,
                horizon: self.horizon,
            });
        }
        if position != self.revealed || self.awaiting_label {
            return Err(LearnerError::Unsupported(
                "continuous exponential weights is only evaluated in left-to-right order".into(),
            ));
        }
        self.awaiting_label = true;
        marginal_mean(self.revealed + 1, self.horizon)
    }

    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError> {
        if position != self.revealed || !self.awaiting_label {
            return Err(LearnerError::Unsupported(
                "continuous exponential weights is only evaluated in left-to-right order".into(),
            ));
        }
        if label != 0.0 {
            return Err(LearnerError::Unsupported(
                "the closed-form marginal holds only while every revealed label is zero".into(),
            ));
        }
        self.revealed += 1;
        self.awaiting_label = false;
        Ok(())
    }
}
