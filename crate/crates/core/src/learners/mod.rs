//! Online prediction algorithms behind one uniform contract: at each
//! trial the engine calls `predict(position)` exactly once, then
//! `observe(position, label)` for the same position; positions never
//! repeat.  Every prediction lies in `[0, 1]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::loss::LossKind;
use crate::types::IsotonicFunction;

pub mod continuous_ew;
pub mod eg;
pub mod ew_net;
pub mod ftrl;
pub mod minimax;
pub mod ogd;

pub use continuous_ew::ContinuousEw;
pub use eg::EgLearner;
pub use ew_net::{EwNet, EwNetIsotonic, EwNetNaive};
pub use ftrl::FtrlLearner;
pub use minimax::{MinimaxAnyOrder, MinimaxIsotonic};
pub use ogd::OgdLearner;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnerError {
    #[error("position {0} was already labeled")]
    AlreadyLabeled(usize),
    #[error("position {position} out of range for horizon {horizon}")]
    OutOfRange { position: usize, horizon: usize },
    #[error("calls must arrive in left-to-right order: expected position {expected}, got {got}")]
    OutOfIsotonicOrder { expected: usize, got: usize },
    #[error("label {label} violates the noise-free promise: feasible range [{lo}, {hi}]")]
    NoiseFreeViolation { label: f64, lo: f64, hi: f64 },
    #[error("covering net has {size} members, above the enumeration limit {limit}")]
    NetTooLarge { size: String, limit: u64 },
    #[error("simplex weights are not normalized: sum = {0}")]
    NotNormalized(f64),
    #[error("unsupported scenario: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// The learner side of the protocol.
pub trait OnlineLearner {
    fn horizon(&self) -> usize;

    fn name(&self) -> String;

    /// Prediction for a not-yet-labeled position, in `[0, 1]`.
    fn predict(&mut self, position: usize) -> Result<f64, LearnerError>;

    /// Reveal the label for a position previously predicted.
    fn observe(&mut self, position: usize, label: f64) -> Result<(), LearnerError>;

    /// Worst-case regret guarantee applicable to this learner under the
    /// adversary's promises, when one exists.
    fn regret_bound(&self, _noise_free: bool, _isotonic_order: bool) -> Option<f64> {
        None
    }
}

/// How OGD and FTRL initialize their parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitSpec {
    /// The ramp `(i+1)/T`.
    Diagonal,
    /// A constant function.
    Constant(f64),
}

impl InitSpec {
    pub fn build(&self, horizon: usize) -> Result<IsotonicFunction, LearnerError> {
        match *self {
            InitSpec::Diagonal => Ok(IsotonicFunction::diagonal(horizon)),
            InitSpec::Constant(c) => IsotonicFunction::constant(horizon, c)
                .map_err(|e| LearnerError::InvalidParameter(e.to_string())),
        }
    }
}

/// Serializable learner configuration; `build` turns it into a live
/// learner for a given horizon and loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum LearnerSpec {
    EwNet {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    EwNetNaive {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    EwEntropic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    Eg {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
    },
    Ogd {
        eta: f64,
        init: InitSpec,
    },
    Ftrl {
        lambda: f64,
        init: InitSpec,
    },
    ContinuousEw,
    MinimaxAny,
    MinimaxIso,
}

pub const LEARNER_NAMES: &[&str] = &[
    "ew-net",
    "ew-net-naive",
    "ew-entropic",
    "eg",
    "ogd",
    "ftrl",
    "continuous-ew",
    "minimax-any",
    "minimax-iso",
];

impl LearnerSpec {
    pub fn cli_name(&self) -> &'static str {
        match self {
            LearnerSpec::EwNet { .. } => "ew-net",
            LearnerSpec::EwNetNaive { .. } => "ew-net-naive",
            LearnerSpec::EwEntropic { .. } => "ew-entropic",
            LearnerSpec::Eg { .. } => "eg",
            LearnerSpec::Ogd { .. } => "ogd",
            LearnerSpec::Ftrl { .. } => "ftrl",
            LearnerSpec::ContinuousEw => "continuous-ew",
            LearnerSpec::MinimaxAny => "minimax-any",
            LearnerSpec::MinimaxIso => "minimax-iso",
        }
    }

    /// Instantiate for a horizon and loss, rejecting incompatible pairs.
    pub fn build(
        &self,
        horizon: usize,
        kind: LossKind,
    ) -> Result<Box<dyn OnlineLearner>, LearnerError> {
        let require = |ok: bool| -> Result<(), LearnerError> {
            if ok {
                Ok(())
            } else {
                Err(LearnerError::InvalidParameter(format!(
                    "learner '{}' does not play {kind} loss",
                    self.cli_name()
                )))
            }
        };
        match *self {
            LearnerSpec::EwNet { k } => {
                require(kind == LossKind::Squared)?;
                Ok(Box::new(EwNet::squared(horizon, k)?))
            }
            LearnerSpec::EwNetNaive { k } => {
                require(kind != LossKind::Absolute)?;
                Ok(Box::new(EwNetNaive::new(horizon, kind, k)?))
            }
            LearnerSpec::EwEntropic { k } => {
                require(kind == LossKind::Entropic)?;
                Ok(Box::new(EwNet::entropic(horizon, k)?))
            }
            LearnerSpec::Eg { eta } => {
                require(matches!(kind, LossKind::Squared | LossKind::Absolute))?;
                Ok(Box::new(EgLearner::new(horizon, kind, eta)?))
            }
            LearnerSpec::Ogd { eta, init } => {
                require(kind == LossKind::Squared)?;
                Ok(Box::new(OgdLearner::new(init.build(horizon)?, eta)?))
            }
            LearnerSpec::Ftrl { lambda, init } => {
                require(kind == LossKind::Squared)?;
                Ok(Box::new(FtrlLearner::new(init.build(horizon)?, lambda)?))
            }
            LearnerSpec::ContinuousEw => {
                require(kind == LossKind::Squared)?;
                Ok(Box::new(ContinuousEw::new(horizon)))
            }
            LearnerSpec::MinimaxAny => {
                require(kind == LossKind::Squared)?;
                Ok(Box::new(MinimaxAnyOrder::new(horizon)))
            }
            LearnerSpec::MinimaxIso => {
                require(kind == LossKind::Squared)?;
                Ok(Box::new(MinimaxIsotonic::new(horizon)))
            }
        }
    }
}
