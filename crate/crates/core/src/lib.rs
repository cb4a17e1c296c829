//! Online isotonic regression testbed.
//!
//! A learner must sequentially predict labels in `[0, 1]` at adversarially
//! chosen positions of a linearly ordered domain, and is judged by regret
//! against the best non-decreasing function in hindsight.  This crate
//! provides:
//!
//! - [`oracle`]: the offline side — pool-adjacent-violators regression,
//!   L1 isotonic fits, and Euclidean projection onto the monotone box.
//! - [`learners`]: online algorithms behind one `predict`/`observe`
//!   contract, from gradient-descent baselines to covering-net
//!   exponential weights and exact minimax strategies.
//! - [`adversaries`]: label-sequence generators and interactive
//!   adversaries, all deterministic per seed.
//! - [`engine`]: the game loop, regret accounting, bound checking, and a
//!   (optionally data-parallel) sweep runner with regret-growth fits.
//! - [`acceptance`]: the built-in verification suite used by the CLI and
//!   by the `acceptance` integration test target.
//!
//! All randomness flows through ChaCha12 streams derived from a master
//! seed, so every run is bit-reproducible.

pub mod acceptance;
pub mod adversaries;
pub mod bruteforce;
pub mod engine;
pub mod learners;
pub mod loss;
pub mod net;
pub mod oracle;
pub mod types;

pub use loss::{loss, LossError, LossKind};
pub use types::{GameTranscript, IsotonicFunction, LabelSequence, RevealOrder, TrialRecord};
