//! Label-sequence generators and interactive adversaries.
//!
//! Scripted adversaries fix labels and reveal order up front; interactive
//! ones (the midpoint splitter and the greedy noise-free adversary) read
//! the learner's prediction before choosing the label, which is what the
//! game-value arguments require.  Every stochastic generator draws from a
//! ChaCha12 stream derived from `(master seed, stream id)`, so runs are
//! bit-reproducible and streams never collide across sweep cells.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::learners::minimax::isotonic_minimax_values;
use crate::types::{LabelSequence, RevealOrder};

/// The project-wide PRNG: ChaCha12 keyed by the master seed, with one
/// independent stream per component.
pub fn derive_rng(master_seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// The adversary side of the protocol: pick a fresh position, see the
/// learner's prediction, answer with a label in `[0, 1]`.
pub trait Adversary {
    fn horizon(&self) -> usize;

    fn name(&self) -> String;

    /// Position for the next trial; must never repeat.
    fn next_index(&mut self) -> usize;

    /// Label for the position just queried, chosen after seeing the
    /// learner's prediction.
    fn label(&mut self, prediction: f64) -> f64;

    /// Promise that the produced labels are monotone in position.
    fn noise_free(&self) -> bool;

    /// Promise that positions are revealed left to right.
    fn isotonic_order(&self) -> bool;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KillerVariant {
    /// Left-to-right reveals, all labels zero.
    Zeros,
    /// Right-to-left reveals, all labels one.
    Ones,
}

/// The sequences on which descent-style learners provably lose: the
/// queried coordinate is never updated before it is queried.
pub fn gd_killer(horizon: usize, variant: KillerVariant) -> (LabelSequence, RevealOrder) {
    match variant {
        KillerVariant::Zeros => (
            LabelSequence::new(vec![0.0; horizon]).unwrap(),
            RevealOrder::isotonic(horizon),
        ),
        KillerVariant::Ones => (
            LabelSequence::new(vec![1.0; horizon]).unwrap(),
            RevealOrder::antitonic(horizon),
        ),
    }
}

/// Default segment count for the hard Bernoulli construction:
/// `round(T^(1/3))`, at least 1.
pub fn default_segment_count(horizon: usize) -> usize {
    ((horizon as f64).powf(1.0 / 3.0).round() as usize).max(1)
}

/// Hard stochastic construction: positions split into `segments`
/// near-equal runs; run `k` (1-based) draws i.i.d. Bernoulli labels with
/// parameter `1/4 + (k-1+w_k)/(2K)` where `w_k` is the k-th selector bit,
/// so every selector keeps the parameters non-decreasing and inside
/// `[1/4, 3/4]`.  Reveal order is left to right.
pub fn lower_bound_sequence(
    horizon: usize,
    segments: usize,
    selector: &[bool],
    rng: &mut ChaCha12Rng,
) -> (LabelSequence, RevealOrder) {
    assert!(horizon >= 1 && segments >= 1);
    assert_eq!(selector.len(), segments, "selector must have one bit per segment");
    let k = segments as f64;
    let labels: Vec<f64> = (1..=horizon)
        .map(|t| {
            // segment of position t is ceil(t K / T); the last absorbs any remainder
            let seg = (t * segments).div_ceil(horizon);
            let w = selector[seg - 1] as usize as f64;
            let p = 0.25 + ((seg - 1) as f64 + w) / (2.0 * k);
            if rng.gen::<f64>() < p {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    (
        LabelSequence::new(labels).unwrap(),
        RevealOrder::isotonic(horizon),
    )
}

/// Segment Bernoulli parameters for a selector, exposed for tests.
pub fn lower_bound_parameters(segments: usize, selector: &[bool]) -> Vec<f64> {
    assert_eq!(selector.len(), segments);
    (1..=segments)
        .map(|k| 0.25 + ((k - 1) as f64 + selector[k - 1] as usize as f64) / (2.0 * segments as f64))
        .collect()
}

/// Sorted uniform draws: a random monotone label sequence.
pub fn random_isotonic(horizon: usize, rng: &mut ChaCha12Rng) -> LabelSequence {
    let mut labels: Vec<f64> = (0..horizon).map(|_| rng.gen::<f64>()).collect();
    labels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    LabelSequence::new(labels).unwrap()
}

/// Random monotone base plus Gaussian noise, clipped back into `[0, 1]`.
pub fn noisy_isotonic(horizon: usize, sigma: f64, rng: &mut ChaCha12Rng) -> LabelSequence {
    assert!(sigma >= 0.0, "noise level must be nonnegative");
    let base = random_isotonic(horizon, rng);
    if sigma == 0.0 {
        return base;
    }
    let normal = Normal::new(0.0, sigma).unwrap();
    let labels: Vec<f64> = base
        .labels()
        .iter()
        .map(|&y| (y + normal.sample(rng)).clamp(0.0, 1.0))
        .collect();
    LabelSequence::new(labels).unwrap()
}

/// Uniformly random permutation of positions.
pub fn random_order(horizon: usize, rng: &mut ChaCha12Rng) -> RevealOrder {
    let mut indices: Vec<usize> = (0..horizon).collect();
    indices.shuffle(rng);
    RevealOrder::new(indices).unwrap()
}

// ---------------------------------------------------------------------------
// Scripted adversary
// ---------------------------------------------------------------------------

/// Fixed labels and reveal order; ignores the learner's predictions.
pub struct Scripted {
    labels: LabelSequence,
    order: RevealOrder,
    cursor: usize,
    current: Option<usize>,
    name: String,
}

impl Scripted {
    pub fn new(labels: LabelSequence, order: RevealOrder, name: impl Into<String>) -> Self {
        assert_eq!(labels.len(), order.len());
        Self {
            labels,
            order,
            cursor: 0,
            current: None,
            name: name.into(),
        }
    }
}

impl Adversary for Scripted {
    fn horizon(&self) -> usize {
        self.labels.len()
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn next_index(&mut self) -> usize {
        let i = self.order.indices()[self.cursor];
        self.cursor += 1;
        self.current = Some(i);
        i
    }

    fn label(&mut self, _prediction: f64) -> f64 {
        let i = self.current.take().expect("label() follows next_index()");
        self.labels.labels()[i]
    }

    fn noise_free(&self) -> bool {
        self.labels.is_isotonic()
    }

    fn isotonic_order(&self) -> bool {
        self.order.is_isotonic()
    }
}

// ---------------------------------------------------------------------------
// Midpoint splitter
// ---------------------------------------------------------------------------

/// Interactive noise-free adversary that bisects the untouched range.
/// Each split queries the midpoint, answers with whichever of {0, 1}
/// hurts the prediction more (ties go to 1), which forces one half to a
/// constant; the forced half is then filled in left to right and the
/// other half is split recursively.  On horizons `2^k - 1` every split
/// extracts loss at least 1/4 from any learner, and exactly 1/4 from the
/// minimax one.
pub struct MidpointSplitter {
    horizon: usize,
    /// forced (position, label) fills, drained before the next split
    pending: std::collections::VecDeque<(usize, f64)>,
    /// half-open ranges still to bisect
    ranges: Vec<(usize, usize)>,
    current: Current,
}

enum Current {
    Idle,
    Fill(f64),
    Split { lo: usize, hi: usize, mid: usize },
}

impl MidpointSplitter {
    pub fn new(horizon: usize) -> Self {
        let ranges = if horizon > 0 { vec![(0, horizon)] } else { Vec::new() };
        Self {
            horizon,
            pending: std::collections::VecDeque::new(),
            ranges,
            current: Current::Idle,
        }
    }
}

impl Adversary for MidpointSplitter {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn name(&self) -> String {
        "midpoint-splitter".into()
    }

    fn next_index(&mut self) -> usize {
        if let Some((pos, lab)) = self.pending.pop_front() {
            self.current = Current::Fill(lab);
            return pos;
        }
        let (lo, hi) = self.ranges.pop().expect("protocol queries exactly T positions");
        let mid = lo + (hi - lo) / 2;
        self.current = Current::Split { lo, hi, mid };
        mid
    }

    fn label(&mut self, prediction: f64) -> f64 {
        match std::mem::replace(&mut self.current, Current::Idle) {
            Current::Fill(lab) => lab,
            Current::Split { lo, hi, mid } => {
                let high_loss = (prediction - 1.0) * (prediction - 1.0);
                let low_loss = prediction * prediction;
                if high_loss >= low_loss {
                    // everything right of the midpoint is forced to 1
                    for pos in mid + 1..hi {
                        self.pending.push_back((pos, 1.0));
                    }
                    if mid > lo {
                        self.ranges.push((lo, mid));
                    }
                    1.0
                } else {
                    for pos in lo..mid {
                        self.pending.push_back((pos, 0.0));
                    }
                    if mid + 1 < hi {
                        self.ranges.push((mid + 1, hi));
                    }
                    0.0
                }
            }
            Current::Idle => panic!("label() follows next_index()"),
        }
    }

    fn noise_free(&self) -> bool {
        true
    }

    fn isotonic_order(&self) -> bool {
        false
    }
}

// ---------------------------------------------------------------------------
// Greedy noise-free adversary, left-to-right
// ---------------------------------------------------------------------------

/// Plays the value-recursion adversary for the left-to-right game: with
/// last label `c` and `n` points remaining, answer the prediction with
/// whichever of `{c, 1}` maximizes immediate loss plus the value of the
/// continuation, ties toward 1.  Forces total loss at least the game
/// value against any learner, with equality against the minimax one.
pub struct GreedyIsotonic {
    horizon: usize,
    values: Vec<f64>,
    revealed: usize,
    last_label: f64,
}

impl GreedyIsotonic {
    pub fn new(horizon: usize) -> Self {
        Self {
            horizon,
            values: isotonic_minimax_values(horizon),
            revealed: 0,
            last_label: 0.0,
        }
    }
}

impl Adversary for GreedyIsotonic {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn name(&self) -> String {
        "greedy-iso".into()
    }

    fn next_index(&mut self) -> usize {
        self.revealed
    }

    fn label(&mut self, prediction: f64) -> f64 {
        let remaining = self.horizon - self.revealed;
        let continuation = self.values[remaining - 1];
        let c = self.last_label;
        let keep = (prediction - c) * (prediction - c) + continuation * (1.0 - c) * (1.0 - c);
        let jump = (prediction - 1.0) * (prediction - 1.0);
        let label = if jump >= keep { 1.0 } else { c };
        self.last_label = label;
        self.revealed += 1;
        label
    }

    fn noise_free(&self) -> bool {
        true
    }

    fn isotonic_order(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

/// Reorder applied to a scripted adversary's reveal sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderOverride {
    /// Keep the generator's own order.
    #[default]
    Default,
    Isotonic,
    Antitonic,
    Random,
}

/// Serializable adversary configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum AdversarySpec {
    LbSegments {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        /// Segment selector bits, e.g. "0110"; random when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<String>,
    },
    GdKillerZeros,
    GdKillerOnes,
    MidpointSplitter,
    GreedyIso,
    RandomIso,
    NoisyIso {
        sigma: f64,
    },
    /// Explicit labels (position order) and optional 1-based reveal order.
    Fixed {
        labels: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<usize>>,
    },
}

pub const ADVERSARY_NAMES: &[&str] = &[
    "lb-segments",
    "gd-killer-zeros",
    "gd-killer-ones",
    "midpoint-splitter",
    "greedy-iso",
    "random-iso",
    "noisy-iso",
    "fixed",
];

impl AdversarySpec {
    pub fn cli_name(&self) -> &'static str {
        match self {
            AdversarySpec::LbSegments { .. } => "lb-segments",
            AdversarySpec::GdKillerZeros => "gd-killer-zeros",
            AdversarySpec::GdKillerOnes => "gd-killer-ones",
            AdversarySpec::MidpointSplitter => "midpoint-splitter",
            AdversarySpec::GreedyIso => "greedy-iso",
            AdversarySpec::RandomIso => "random-iso",
            AdversarySpec::NoisyIso { .. } => "noisy-iso",
            AdversarySpec::Fixed { .. } => "fixed",
        }
    }

    pub fn is_interactive(&self) -> bool {
        matches!(
            self,
            AdversarySpec::MidpointSplitter | AdversarySpec::GreedyIso
        )
    }

    /// Instantiate for a horizon, drawing any randomness from the
    /// `(master_seed, stream)` ChaCha12 stream.
    pub fn build(
        &self,
        horizon: usize,
        order: OrderOverride,
        master_seed: u64,
        stream: u64,
    ) -> Result<Box<dyn Adversary>, String> {
        if horizon == 0 {
            return Err("horizon must be positive".into());
        }
        if self.is_interactive() && order != OrderOverride::Default {
            return Err(format!(
                "adversary '{}' chooses its own reveal order",
                self.cli_name()
            ));
        }
        let mut rng = derive_rng(master_seed, stream);
        let (labels, default_order, name) = match self {
            AdversarySpec::MidpointSplitter => {
                return Ok(Box::new(MidpointSplitter::new(horizon)))
            }
            AdversarySpec::GreedyIso => return Ok(Box::new(GreedyIsotonic::new(horizon))),
            AdversarySpec::LbSegments { k, omega } => {
                let segments = k.unwrap_or_else(|| default_segment_count(horizon)).max(1);
                let selector: Vec<bool> = match omega {
                    Some(bits) => {
                        let parsed: Result<Vec<bool>, String> = bits
                            .chars()
                            .map(|c| match c {
                                '0' => Ok(false),
                                '1' => Ok(true),
                                other => Err(format!("bad selector bit '{other}'")),
                            })
                            .collect();
                        let parsed = parsed?;
                        if parsed.len() != segments {
                            return Err(format!(
                                "selector has {} bits but there are {segments} segments",
                                parsed.len()
                            ));
                        }
                        parsed
                    }
                    None => (0..segments).map(|_| rng.gen::<bool>()).collect(),
                };
                let (labels, order) = lower_bound_sequence(horizon, segments, &selector, &mut rng);
                (labels, order, "lb-segments".to_string())
            }
            AdversarySpec::GdKillerZeros => {
                let (labels, order) = gd_killer(horizon, KillerVariant::Zeros);
                (labels, order, "gd-killer-zeros".into())
            }
            AdversarySpec::GdKillerOnes => {
                let (labels, order) = gd_killer(horizon, KillerVariant::Ones);
                (labels, order, "gd-killer-ones".into())
            }
            AdversarySpec::RandomIso => {
                let labels = random_isotonic(horizon, &mut rng);
                (labels, RevealOrder::isotonic(horizon), "random-iso".into())
            }
            AdversarySpec::NoisyIso { sigma } => {
                if *sigma < 0.0 {
                    return Err("sigma must be nonnegative".into());
                }
                let labels = noisy_isotonic(horizon, *sigma, &mut rng);
                (labels, RevealOrder::isotonic(horizon), "noisy-iso".into())
            }
            AdversarySpec::Fixed { labels, order } => {
                if labels.len() != horizon {
                    return Err(format!(
                        "fixed adversary has {} labels but horizon is {horizon}",
                        labels.len()
                    ));
                }
                let labels = LabelSequence::new(labels.clone()).map_err(|e| e.to_string())?;
                let reveal = match order {
                    Some(one_based) => {
                        let zero: Vec<usize> = one_based
                            .iter()
                            .map(|&i| i.checked_sub(1).ok_or("order indices are 1-based"))
                            .collect::<Result<_, _>>()?;
                        RevealOrder::new(zero).map_err(|e| e.to_string())?
                    }
                    None => RevealOrder::isotonic(horizon),
                };
                (labels, reveal, "fixed".into())
            }
        };
        let reveal = match order {
            OrderOverride::Default => default_order,
            OrderOverride::Isotonic => RevealOrder::isotonic(horizon),
            OrderOverride::Antitonic => RevealOrder::antitonic(horizon),
            OrderOverride::Random => random_order(horizon, &mut derive_rng(master_seed, stream ^ 0x9e3779b97f4a7c15)),
        };
        Ok(Box::new(Scripted::new(labels, reveal, name)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn killer_sequences_are_what_they_say() {
        let (labels, order) = gd_killer(3, KillerVariant::Zeros);
        assert_eq!(labels.labels(), &[0.0, 0.0, 0.0]);
        assert_eq!(order.indices(), &[0, 1, 2]);
        let (labels, order) = gd_killer(3, KillerVariant::Ones);
        assert_eq!(labels.labels(), &[1.0, 1.0, 1.0]);
        assert_eq!(order.indices(), &[2, 1, 0]);
        // both have a perfectly fitting constant comparator
        assert!(labels.is_isotonic());
    }

    #[test]
    fn lower_bound_parameter_grid() {
        // two segments: parameter pairs drawn from {1/4, 1/2} x {1/2, 3/4}
        assert_eq!(lower_bound_parameters(2, &[false, false]), vec![0.25, 0.5]);
        assert_eq!(lower_bound_parameters(2, &[false, true]), vec![0.25, 0.75]);
        assert_eq!(lower_bound_parameters(2, &[true, false]), vec![0.5, 0.5]);
        assert_eq!(lower_bound_parameters(2, &[true, true]), vec![0.5, 0.75]);
        // every selector keeps parameters in [1/4, 3/4] and non-decreasing
        for segments in 1..=6usize {
            for code in 0..1usize << segments {
                let selector: Vec<bool> = (0..segments).map(|b| code >> b & 1 == 1).collect();
                let p = lower_bound_parameters(segments, &selector);
                assert!(p.windows(2).all(|w| w[0] <= w[1]));
                assert!(p.iter().all(|&v| (0.25..=0.75).contains(&v)));
            }
        }
    }

    #[test]
    fn lower_bound_sequence_is_reproducible() {
        let selector = [true, false, true];
        let a = lower_bound_sequence(20, 3, &selector, &mut derive_rng(9, 4));
        let b = lower_bound_sequence(20, 3, &selector, &mut derive_rng(9, 4));
        assert_eq!(a, b);
        let c = lower_bound_sequence(20, 3, &selector, &mut derive_rng(9, 5));
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn benign_generators() {
        let mut rng = derive_rng(1, 0);
        let iso = random_isotonic(50, &mut rng);
        assert!(iso.is_isotonic());

        let mut rng = derive_rng(1, 1);
        let noiseless = noisy_isotonic(50, 0.0, &mut rng);
        let mut rng = derive_rng(1, 1);
        let base = random_isotonic(50, &mut rng);
        assert_eq!(noiseless, base);

        let mut rng = derive_rng(1, 2);
        let order = random_order(100, &mut rng);
        let mut sorted = order.indices().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn midpoint_splitter_labels_are_isotonic_and_cover() {
        for t in [1usize, 2, 5, 7, 12, 15] {
            let mut adv = MidpointSplitter::new(t);
            let mut labels = vec![f64::NAN; t];
            for _ in 0..t {
                let i = adv.next_index();
                assert!(labels[i].is_nan(), "repeat at {i}");
                labels[i] = adv.label(0.5);
            }
            assert!(labels.windows(2).all(|w| w[0] <= w[1]), "t={t}: {labels:?}");
        }
    }

    #[test]
    fn midpoint_splitter_forces_quarter_per_split() {
        // any constant predictor loses at least log2(T+1)/4 on 2^k - 1 points
        for t in [1usize, 3, 7, 15] {
            let mut adv = MidpointSplitter::new(t);
            let mut total = 0.0;
            for _ in 0..t {
                let _ = adv.next_index();
                let y = adv.label(0.5);
                total += (y - 0.5) * (y - 0.5);
            }
            let splits = ((t + 1) as f64).log2();
            assert!(total >= 0.25 * splits - 1e-12, "t={t}: {total}");
        }
    }

    #[test]
    fn greedy_isotonic_labels_stay_monotone() {
        let mut adv = GreedyIsotonic::new(10);
        let mut last = 0.0;
        for t in 0..10 {
            let i = adv.next_index();
            assert_eq!(i, t);
            let y = adv.label(0.3);
            assert!(y >= last);
            last = y;
        }
    }

    #[test]
    fn greedy_single_trial_forces_a_quarter() {
        // constant-half predictor: both answers tie at 1/4, tie goes to 1
        let mut adv = GreedyIsotonic::new(1);
        let _ = adv.next_index();
        let y = adv.label(0.5);
        assert_eq!(y, 1.0);
    }

    #[test]
    fn spec_build_rejects_bad_configs() {
        let spec = AdversarySpec::LbSegments {
            k: Some(3),
            omega: Some("01".into()),
        };
        assert!(spec.build(12, OrderOverride::Default, 0, 0).is_err());
        assert!(AdversarySpec::MidpointSplitter
            .build(7, OrderOverride::Random, 0, 0)
            .is_err());
        let fixed = AdversarySpec::Fixed {
            labels: vec![0.5; 3],
            order: Some(vec![1, 2, 2]),
        };
        assert!(fixed.build(3, OrderOverride::Default, 0, 0).is_err());
    }

    #[test]
    fn spec_build_is_deterministic() {
        let spec = AdversarySpec::LbSegments { k: None, omega: None };
        let mut a = spec.build(32, OrderOverride::Default, 7, 3).unwrap();
        let mut b = spec.build(32, OrderOverride::Default, 7, 3).unwrap();
        for _ in 0..32 {
            let ia = a.next_index();
            let ib = b.next_index();
            assert_eq!(ia, ib);
            assert_eq!(a.label(0.5), b.label(0.5));
        }
    }
}
