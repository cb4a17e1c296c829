//! The game loop and everything measured around it: per-trial losses,
//! regret against the offline oracle, theorem-bound checks, grid-rounding
//! diagnostics, and a sweep runner that fans out over horizons, seeds,
//! learners, and adversaries (in parallel when the `parallel` feature is
//! on) and fits regret-growth exponents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::adversaries::{Adversary, AdversarySpec, OrderOverride};
use crate::learners::{LearnerError, LearnerSpec, OnlineLearner};
use crate::loss::{loss, LossError, LossKind};
use crate::oracle::{best_isotonic_loss, pava_unit, OracleError};
use crate::types::{DomainError, GameTranscript, TrialRecord};

/// Learners must stay interior under entropic loss; predictions are
/// clamped to `[eps, 1 - eps]` with this eps before scoring.
pub const ENTROPIC_CLAMP: f64 = 1e-9;

/// Slack applied when flagging a theorem-bound violation.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("learner horizon {learner} does not match adversary horizon {adversary}")]
    HorizonMismatch { learner: usize, adversary: usize },
    #[error("trial {trial}: adversary repeated position {position}")]
    RepeatedIndex { trial: usize, position: usize },
    #[error("trial {trial}: adversary chose position {position} outside the horizon")]
    IndexOutOfRange { trial: usize, position: usize },
    #[error("trial {trial}: learner prediction {value} lies outside [0, 1]")]
    PredictionOutOfRange { trial: usize, value: f64 },
    #[error("trial {trial}: adversary label {value} lies outside [0, 1]")]
    LabelOutOfRange { trial: usize, value: f64 },
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("bad configuration: {0}")]
    Config(String),
}

/// Outcome of one full game.
#[derive(Debug, Clone, Serialize)]
pub struct GameResult {
    pub learner: String,
    pub adversary: String,
    pub kind: LossKind,
    pub horizon: usize,
    pub learner_loss: f64,
    pub oracle_loss: f64,
    /// `learner_loss - oracle_loss`; may be negative.
    pub regret: f64,
    /// Worst-case guarantee applicable to this learner/adversary pair,
    /// when one exists.
    pub bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
    pub transcript: GameTranscript,
}

/// Play the full protocol: for each trial the adversary picks a fresh
/// position, the learner predicts, the adversary labels (seeing the
/// prediction), the learner observes.  Afterwards the offline oracle is
/// evaluated on the complete label sequence and the regret computed.
pub fn run_game(
    learner: &mut dyn OnlineLearner,
    adversary: &mut dyn Adversary,
    kind: LossKind,
) -> Result<GameResult, EngineError> {
    let horizon = learner.horizon();
    if horizon != adversary.horizon() {
        return Err(EngineError::HorizonMismatch {
            learner: horizon,
            adversary: adversary.horizon(),
        });
    }
    let mut seen = vec![false; horizon];
    let mut trials = Vec::with_capacity(horizon);
    let mut learner_loss = 0.0;
    for trial in 1..=horizon {
        let position = adversary.next_index();
        if position >= horizon {
            return Err(EngineError::IndexOutOfRange { trial, position });
        }
        if seen[position] {
            return Err(EngineError::RepeatedIndex { trial, position });
        }
        seen[position] = true;

        let mut prediction = learner.predict(position)?;
        if !(0.0..=1.0).contains(&prediction) || !prediction.is_finite() {
            return Err(EngineError::PredictionOutOfRange {
                trial,
                value: prediction,
            });
        }
        if kind == LossKind::Entropic {
            prediction = prediction.clamp(ENTROPIC_CLAMP, 1.0 - ENTROPIC_CLAMP);
        }

        let label = adversary.label(prediction);
        if !(0.0..=1.0).contains(&label) {
            return Err(EngineError::LabelOutOfRange {
                trial,
                value: label,
            });
        }
        let trial_loss = loss(kind, label, prediction)?;
        learner_loss += trial_loss;
        learner.observe(position, label)?;
        trials.push(TrialRecord {
            trial,
            index: position + 1,
            prediction,
            label,
            loss: trial_loss,
        });
    }

    let transcript = GameTranscript { kind, trials };
    let labels = transcript.labels_in_position_order()?;
    let oracle_loss = best_isotonic_loss(&labels, kind)?;
    let regret = learner_loss - oracle_loss;
    let bound = learner.regret_bound(adversary.noise_free(), adversary.isotonic_order());
    let bound_satisfied = bound.map(|b| regret <= b + BOUND_TOLERANCE);
    Ok(GameResult {
        learner: learner.name(),
        adversary: adversary.name(),
        kind,
        horizon,
        learner_loss,
        oracle_loss,
        regret,
        bound,
        bound_satisfied,
        transcript,
    })
}

// ---------------------------------------------------------------------------
// Grid-rounding diagnostic
// ---------------------------------------------------------------------------

/// Round each value to the nearest multiple of `1/k`, halves upward.
/// Rounding preserves monotonicity.
pub fn round_to_grid(values: &[f64], k: usize) -> Vec<f64> {
    let kf = k as f64;
    values
        .iter()
        .map(|&v| (v * kf + 0.5).floor().clamp(0.0, kf) / kf)
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscretizationGap {
    /// Extra squared loss of the grid-rounded fit over the exact fit.
    pub gap: f64,
    /// Squared distance between the two fits; equals `gap` by the
    /// level-set mean property.
    pub grid_distance_sq: f64,
}

/// Cost of rounding the offline fit onto the `1/k` grid.  The gap is at
/// most `T / (4 k^2)` and coincides with the squared distance between the
/// fits; both sides are returned so the identity itself can be audited.
pub fn discretization_gap(labels: &[f64], k: usize) -> Result<DiscretizationGap, OracleError> {
    let fit = pava_unit(labels)?;
    let rounded = round_to_grid(fit.values(), k);
    let mut gap = 0.0;
    let mut dist = 0.0;
    for ((&y, &f), &g) in labels.iter().zip(fit.values()).zip(&rounded) {
        gap += (y - g) * (y - g) - (y - f) * (y - f);
        dist += (g - f) * (g - f);
    }
    Ok(DiscretizationGap {
        gap: gap.max(0.0),
        grid_distance_sq: dist,
    })
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecMode {
    Sequential,
    /// Rayon over cells; falls back to sequential when the `parallel`
    /// feature is compiled out.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub horizons: Vec<usize>,
    pub seeds: Vec<u64>,
    pub learners: Vec<LearnerSpec>,
    pub adversaries: Vec<AdversarySpec>,
    #[serde(default)]
    pub order: OrderOverride,
    pub kind: LossKind,
    pub master_seed: u64,
    #[serde(default)]
    pub mode: ExecMode,
}

/// One game inside a sweep, without its transcript.
#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub learner: String,
    pub adversary: String,
    pub horizon: usize,
    pub seed: u64,
    pub learner_loss: f64,
    pub oracle_loss: f64,
    pub regret: f64,
    pub bound: Option<f64>,
    pub bound_violated: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitPoint {
    pub horizon: usize,
    pub max_regret: f64,
    pub mean_regret: f64,
}

/// Log-log regret growth for one learner/adversary pair.  The worst case
/// over seeds is the primary quantity; the mean is kept alongside.
#[derive(Debug, Clone, Serialize)]
pub struct RegretFit {
    pub learner: String,
    pub adversary: String,
    pub points: Vec<FitPoint>,
    pub max_fit: Option<LineFit>,
    pub mean_fit: Option<LineFit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub cells: Vec<CellResult>,
    pub fits: Vec<RegretFit>,
    pub bound_violations: usize,
}

/// Least squares of `ln y` against `ln x` over the points with positive
/// ordinate; `None` with fewer than two usable points.
pub fn fit_loglog(points: &[(f64, f64)]) -> Option<LineFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual_rms = (usable
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Some(LineFit {
        slope,
        intercept,
        residual_rms,
    })
}

fn run_cell(
    cfg: &SweepConfig,
    learner_spec: &LearnerSpec,
    adversary_spec: &AdversarySpec,
    horizon: usize,
    seed: u64,
) -> Result<CellResult, EngineError> {
    let mut learner = learner_spec.build(horizon, cfg.kind)?;
    let mut adversary = adversary_spec
        .build(horizon, cfg.order, cfg.master_seed, seed)
        .map_err(EngineError::Config)?;
    let game = run_game(learner.as_mut(), adversary.as_mut(), cfg.kind)?;
    Ok(CellResult {
        learner: learner_spec.cli_name().to_string(),
        adversary: adversary_spec.cli_name().to_string(),
        horizon,
        seed,
        learner_loss: game.learner_loss,
        oracle_loss: game.oracle_loss,
        regret: game.regret,
        bound: game.bound,
        bound_violated: game.bound_satisfied == Some(false),
    })
}

/// Run the full cross product of horizons, seeds, learners, and
/// adversaries.  Cells are independent games with per-cell derived random
/// streams; the report is sorted, so the execution mode cannot change the
/// output.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport, EngineError> {
    if cfg.horizons.is_empty() {
        return Err(EngineError::Config("horizon grid is empty".into()));
    }
    if cfg.seeds.is_empty() {
        return Err(EngineError::Config("seed list is empty".into()));
    }
    if cfg.learners.is_empty() || cfg.adversaries.is_empty() {
        return Err(EngineError::Config(
            "need at least one learner and one adversary".into(),
        ));
    }
    let mut cells_in: Vec<(usize, usize, usize, u64)> = Vec::new();
    for (li, _) in cfg.learners.iter().enumerate() {
        for (ai, _) in cfg.adversaries.iter().enumerate() {
            for &t in &cfg.horizons {
                for &seed in &cfg.seeds {
                    cells_in.push((li, ai, t, seed));
                }
            }
        }
    }

    let run_one = |&(li, ai, t, seed): &(usize, usize, usize, u64)| {
        run_cell(cfg, &cfg.learners[li], &cfg.adversaries[ai], t, seed)
    };

    let mut cells: Vec<CellResult> = match cfg.mode {
        ExecMode::Sequential => cells_in.iter().map(run_one).collect::<Result<_, _>>()?,
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                cells_in
                    .par_iter()
                    .map(run_one)
                    .collect::<Result<Vec<_>, _>>()?
            }
            #[cfg(not(feature = "parallel"))]
            {
                cells_in.iter().map(run_one).collect::<Result<Vec<_>, _>>()?
            }
        }
    };
    cells.sort_by(|a, b| {
        (&a.learner, &a.adversary, a.horizon, a.seed)
            .partial_cmp(&(&b.learner, &b.adversary, b.horizon, b.seed))
            .unwrap()
    });

    // group per (learner, adversary) for the exponent fits
    let mut grouped: BTreeMap<(String, String), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for cell in &cells {
        grouped
            .entry((cell.learner.clone(), cell.adversary.clone()))
            .or_default()
            .entry(cell.horizon)
            .or_default()
            .push(cell.regret);
    }
    let fits = grouped
        .into_iter()
        .map(|((learner, adversary), by_t)| {
            let points: Vec<FitPoint> = by_t
                .into_iter()
                .map(|(horizon, regrets)| {
                    let max_regret = regrets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let mean_regret = regrets.iter().sum::<f64>() / regrets.len() as f64;
                    FitPoint {
                        horizon,
                        max_regret,
                        mean_regret,
                    }
                })
                .collect();
            let max_fit = fit_loglog(
                &points
                    .iter()
                    .map(|p| (p.horizon as f64, p.max_regret))
                    .collect::<Vec<_>>(),
            );
            let mean_fit = fit_loglog(
                &points
                    .iter()
                    .map(|p| (p.horizon as f64, p.mean_regret))
                    .collect::<Vec<_>>(),
            );
            RegretFit {
                learner,
                adversary,
                points,
                max_fit,
                mean_fit,
            }
        })
        .collect();

    let bound_violations = cells.iter().filter(|c| c.bound_violated).count();
    Ok(SweepReport {
        cells,
        fits,
        bound_violations,
    })
}
