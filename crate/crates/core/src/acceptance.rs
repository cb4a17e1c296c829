//! The built-in verification suite.
//!
//! Twelve checks pin every tolerance and threshold the project promises:
//! exact DP-vs-enumeration agreement, the closed-form regret bounds with
//! zero tolerated violations, the exact minimax game values, the killer
//! identities, the grid-rounding lemma, and the statistical rate checks.
//! The CLI `verify` subcommand and the `acceptance` integration test both
//! run these same functions, so there is one source of truth for what
//! "working" means.
//!
//! Heavy sweeps are computed once per process and shared between checks.

use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::adversaries::{self, AdversarySpec, OrderOverride};
use crate::bruteforce;
use crate::engine::{self, run_game, ExecMode, SweepConfig, SweepReport};
use crate::learners::minimax::{anyorder_minimax_values, isotonic_minimax_values};
use crate::learners::{
    continuous_ew, eg, ew_net, InitSpec, LearnerSpec, OnlineLearner,
};
use crate::loss::{loss, LossKind};
use crate::net;
use crate::oracle::{best_isotonic_loss, l1_isotonic, pava, pava_unit, project_isotonic_box};
use crate::types::{IsotonicFunction, LabelSequence, RevealOrder};

/// Master seed for every randomized check, fixed so the suite is
/// reproducible down to the byte.
const SUITE_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyConfig {
    /// Multiply one stored net-forecaster update factor by this value
    /// inside the DP-equivalence check.  Harness self-test: a corrupted
    /// update must make that check fail.
    pub beta_fault: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:<28} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.seconds,
            self.detail
        )
    }
}

pub const CHECKS: &[(&str, &str)] = &[
    (
        "dp-enumeration-equivalence",
        "net forecaster DP matches full enumeration on randomized games",
    ),
    (
        "squared-net-bound",
        "squared-loss net forecaster never exceeds its regret bound",
    ),
    (
        "isotonic-fast-path",
        "left-to-right fast path matches the DP at O(K) per round",
    ),
    (
        "killer-linear-regret",
        "OGD and FTRL lose linearly on the killer sequences",
    ),
    (
        "continuous-ew-linear-loss",
        "continuous-prior EW stays above 1/8 late and loses linearly",
    ),
    (
        "anyorder-minimax-value",
        "arbitrary-order minimax play attains log2(T+1)/4 exactly",
    ),
    (
        "isotonic-minimax-value",
        "left-to-right minimax play attains the exact game value",
    ),
    (
        "entropic-net-bound",
        "entropic net forecaster never exceeds its regret bound",
    ),
    (
        "eg-regret",
        "EG honors the squared-loss bound; absolute-loss regret grows ~ sqrt(T)",
    ),
    (
        "discretization-gap",
        "grid rounding costs at most T/(4K^2) with the level-set identity",
    ),
    (
        "lower-bound-rate",
        "hard-instance regret grows at the cube-root rate",
    ),
    (
        "pava-oracle",
        "PAVA optimality, level-set means, Bregman invariance, L1 fit",
    ),
];

struct Check {
    id: &'static str,
    title: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
    start: Instant,
}

impl Check {
    fn new(id: &'static str, title: &'static str) -> Self {
        Self {
            id,
            title,
            failures: Vec::new(),
            notes: Vec::new(),
            start: Instant::now(),
        }
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 8 {
            self.failures.push(msg());
        } else if !ok {
            // keep counting without flooding the report
            self.failures.push(String::new());
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    fn finish(self) -> CheckOutcome {
        let failed = self.failures.len();
        let detail = if self.failures.is_empty() {
            self.notes.join("; ")
        } else {
            format!(
                "{} violation(s): {}",
                failed,
                self.failures
                    .iter()
                    .filter(|f| !f.is_empty())
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(" | ")
            )
        };
        CheckOutcome {
            id: self.id,
            title: self.title,
            passed: self.failures.is_empty(),
            detail,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

/// Run every check whose id contains `filter` (all of them when `None`),
/// in the listed order.
pub fn run(filter: Option<&str>, cfg: &VerifyConfig) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .filter(|(id, _)| filter.is_none_or(|f| id.contains(f)))
        .map(|&(id, title)| run_check(id, title, cfg))
        .collect()
}

fn run_check(id: &'static str, title: &'static str, cfg: &VerifyConfig) -> CheckOutcome {
    match id {
        "dp-enumeration-equivalence" => check_dp_enumeration(title, cfg),
        "squared-net-bound" => check_squared_net_bound(title),
        "isotonic-fast-path" => check_fast_path(title),
        "killer-linear-regret" => check_killer_regret(title),
        "continuous-ew-linear-loss" => check_continuous_ew(title),
        "anyorder-minimax-value" => check_anyorder_minimax(title),
        "isotonic-minimax-value" => check_isotonic_minimax(title),
        "entropic-net-bound" => check_entropic_net_bound(title),
        "eg-regret" => check_eg(title),
        "discretization-gap" => check_discretization(title),
        "lower-bound-rate" => check_lower_bound_rate(title),
        "pava-oracle" => check_pava(title),
        _ => unreachable!("unknown check id {id}"),
    }
}

// ---------------------------------------------------------------------------
// Shared heavy sweeps
// ---------------------------------------------------------------------------

const LB_HORIZONS: &[usize] = &[64, 128, 256, 512, 1024, 2048, 4096, 8192];
const LB_SEEDS: u64 = 20;

/// Tuned net forecaster against the hard Bernoulli construction over the
/// full horizon grid; shared by the bound check and the rate check.
fn lb_sweep() -> &'static SweepReport {
    static SWEEP: OnceLock<SweepReport> = OnceLock::new();
    SWEEP.get_or_init(|| {
        engine::sweep(&SweepConfig {
            horizons: LB_HORIZONS.to_vec(),
            seeds: (0..LB_SEEDS).collect(),
            learners: vec![LearnerSpec::EwNet { k: None }],
            adversaries: vec![AdversarySpec::LbSegments { k: None, omega: None }],
            order: OrderOverride::Default,
            kind: LossKind::Squared,
            master_seed: SUITE_SEED,
            mode: ExecMode::default(),
        })
        .expect("hard-instance sweep")
    })
}

// ---------------------------------------------------------------------------
// 1. DP vs enumeration
// ---------------------------------------------------------------------------

fn check_dp_enumeration(title: &'static str, cfg: &VerifyConfig) -> CheckOutcome {
    let mut check = Check::new("dp-enumeration-equivalence", title);
    let mut rng = adversaries::derive_rng(SUITE_SEED, 1);
    let games = 220usize;
    let mut max_rel: f64 = 0.0;
    for game in 0..games {
        let horizon = rng.gen_range(1..=6);
        let entropic = game % 2 == 1;
        let (kind, k) = if entropic {
            (LossKind::Entropic, rng.gen_range(2..=3))
        } else {
            (LossKind::Squared, rng.gen_range(1..=3))
        };
        let mut dp = if entropic {
            ew_net::EwNet::entropic(horizon, Some(k)).unwrap()
        } else {
            ew_net::EwNet::squared(horizon, Some(k)).unwrap()
        };
        let eta = if entropic { 1.0 } else { 0.5 };
        let mut history: Vec<(usize, f64)> = Vec::new();
        let mut order: Vec<usize> = (0..horizon).collect();
        order.shuffle(&mut rng);
        for (trial, &pos) in order.iter().enumerate() {
            let a = dp.predict_at(pos).unwrap();
            let b =
                ew_net::naive_net_prediction(dp.grid(), eta, kind, horizon, &history, pos).unwrap();
            let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-3);
            max_rel = max_rel.max(rel);
            check.require(rel <= 1e-9, || {
                format!("game {game} trial {trial}: dp {a} vs enumeration {b}")
            });
            let label = if entropic {
                0.05 + 0.9 * rng.gen::<f64>()
            } else {
                rng.gen::<f64>()
            };
            dp.observe_at(pos, label).unwrap();
            history.push((pos, label));
            if trial == 0 {
                if let Some(factor) = cfg.beta_fault {
                    dp.scale_beta_entry(pos, 0, factor);
                }
            }
        }
    }
    let elapsed = check.start.elapsed().as_secs_f64();
    check.require(elapsed < 10.0, || format!("took {elapsed:.1}s, budget 10s"));
    check.note(format!("{games} games, max relative gap {max_rel:.2e}"));
    check.finish()
}

// ---------------------------------------------------------------------------
// 2. Squared-loss net bound
// ---------------------------------------------------------------------------

fn check_squared_net_bound(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("squared-net-bound", title);
    let mut cells = 0usize;

    for cell in lb_sweep().cells.iter().filter(|c| c.horizon <= 4096) {
        cells += 1;
        check.require(cell.bound.is_some() && !cell.bound_violated, || {
            format!(
                "lb-segments t={} seed={}: regret {} vs bound {:?}",
                cell.horizon, cell.seed, cell.regret, cell.bound
            )
        });
    }

    let extra = engine::sweep(&SweepConfig {
        horizons: vec![64, 128, 256, 512, 1024, 2048, 4096],
        seeds: (0..10).collect(),
        learners: vec![LearnerSpec::EwNet { k: None }],
        adversaries: vec![
            AdversarySpec::GdKillerZeros,
            AdversarySpec::GdKillerOnes,
            AdversarySpec::RandomIso,
        ],
        order: OrderOverride::Default,
        kind: LossKind::Squared,
        master_seed: SUITE_SEED,
        mode: ExecMode::default(),
    })
    .expect("bound matrix sweep");
    let shuffled = engine::sweep(&SweepConfig {
        horizons: vec![64, 256, 1024, 4096],
        seeds: (0..10).collect(),
        learners: vec![LearnerSpec::EwNet { k: None }],
        adversaries: vec![AdversarySpec::RandomIso, AdversarySpec::NoisyIso { sigma: 0.25 }],
        order: OrderOverride::Random,
        kind: LossKind::Squared,
        master_seed: SUITE_SEED,
        mode: ExecMode::default(),
    })
    .expect("shuffled-order sweep");
    for cell in extra.cells.iter().chain(&shuffled.cells) {
        cells += 1;
        check.require(cell.bound.is_some() && !cell.bound_violated, || {
            format!(
                "{} t={} seed={}: regret {} vs bound {:?}",
                cell.adversary, cell.horizon, cell.seed, cell.regret, cell.bound
            )
        });
    }

    let elapsed = check.start.elapsed().as_secs_f64();
    check.require(elapsed < 300.0, || format!("took {elapsed:.0}s, budget 300s"));
    check.note(format!("{cells} games, zero bound violations"));
    check.finish()
}

// ---------------------------------------------------------------------------
// 3. Fast path
// ---------------------------------------------------------------------------

fn check_fast_path(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("isotonic-fast-path", title);
    let mut rng = adversaries::derive_rng(SUITE_SEED, 3);
    let mut max_rel: f64 = 0.0;
    for &(t, k) in &[(50usize, 10usize), (127, 7), (200, 1), (200, 10)] {
        let mut slow = ew_net::EwNet::squared(t, Some(k)).unwrap();
        let mut fast = ew_net::EwNetIsotonic::squared(t, Some(k)).unwrap();
        for pos in 0..t {
            let a = slow.predict_at(pos).unwrap();
            let b = fast.predict(pos).unwrap();
            let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-3);
            max_rel = max_rel.max(rel);
            check.require(rel <= 1e-10, || {
                format!("t={t} k={k} pos={pos}: slow {a} vs fast {b}")
            });
            let y = rng.gen::<f64>();
            slow.observe_at(pos, y).unwrap();
            fast.observe(pos, y).unwrap();
        }
    }

    // structural O(K): per-round inner-loop work is identical across
    // horizons at fixed K
    let per_round = |t: usize, k: usize| -> Vec<u64> {
        let mut fast = ew_net::EwNetIsotonic::squared(t, Some(k)).unwrap();
        let mut rng = adversaries::derive_rng(SUITE_SEED, 4);
        let mut deltas = Vec::with_capacity(t);
        let mut last = 0;
        for pos in 0..t {
            fast.predict(pos).unwrap();
            fast.observe(pos, rng.gen()).unwrap();
            deltas.push(fast.inner_ops() - last);
            last = fast.inner_ops();
        }
        deltas
    };
    let k = 10;
    let short = per_round(50, k);
    let long = per_round(200, k);
    let expected = 2 * (k as u64 + 1);
    check.require(
        short.iter().all(|&d| d == expected) && long.iter().all(|&d| d == expected),
        || "per-round inner-loop work depends on the horizon".to_string(),
    );
    check.note(format!(
        "max relative gap {max_rel:.2e}; {expected} inner ops per round at k={k} for both T=50 and T=200"
    ));
    check.finish()
}

// ---------------------------------------------------------------------------
// 4. Killer sequences
// ---------------------------------------------------------------------------

fn check_killer_regret(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("killer-linear-regret", title);
    for &t in &[100usize, 1000] {
        let tf = t as f64;
        let ramp = IsotonicFunction::diagonal(t);
        let loss_zeros_expect: f64 = ramp.values().iter().map(|&v| v * v).sum();
        let loss_ones_expect: f64 = ramp.values().iter().map(|&v| (1.0 - v) * (1.0 - v)).sum();

        let mut specs: Vec<(String, LearnerSpec)> = Vec::new();
        for &eta in &[0.1, 0.5, 1.0] {
            specs.push((
                format!("ogd eta={eta}"),
                LearnerSpec::Ogd {
                    eta,
                    init: InitSpec::Diagonal,
                },
            ));
        }
        for &lambda in &[0.1, 1.0, 10.0] {
            specs.push((
                format!("ftrl lambda={lambda}"),
                LearnerSpec::Ftrl {
                    lambda,
                    init: InitSpec::Diagonal,
                },
            ));
        }
        for (label, spec) in specs {
            let run = |adv: AdversarySpec| {
                let mut learner = spec.build(t, LossKind::Squared).unwrap();
                let mut adversary = adv.build(t, OrderOverride::Default, 0, 0).unwrap();
                run_game(learner.as_mut(), adversary.as_mut(), LossKind::Squared).unwrap()
            };
            let zeros = run(AdversarySpec::GdKillerZeros);
            let ones = run(AdversarySpec::GdKillerOnes);
            check.require(
                (zeros.learner_loss - loss_zeros_expect).abs() <= 1e-9,
                || {
                    format!(
                        "{label} t={t}: zeros loss {} != {loss_zeros_expect}",
                        zeros.learner_loss
                    )
                },
            );
            check.require(
                (ones.learner_loss - loss_ones_expect).abs() <= 1e-9,
                || {
                    format!(
                        "{label} t={t}: ones loss {} != {loss_ones_expect}",
                        ones.learner_loss
                    )
                },
            );
            let worst = zeros.regret.max(ones.regret);
            check.require(worst >= tf / 4.0 - 1e-6, || {
                format!("{label} t={t}: worst-killer regret {worst} < T/4")
            });
        }
    }
    check.note("loss identities exact; worst-killer regret >= T/4 for every eta and lambda".to_string());
    check.finish()
}

// ---------------------------------------------------------------------------
// 5. Continuous-prior exponential weights
// ---------------------------------------------------------------------------

fn check_continuous_ew(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("continuous-ew-linear-loss", title);
    let t = 1024usize;

    let first = continuous_ew::marginal_mean(1, t).unwrap();
    check.require(
        (first - 1.0 / (t + 1) as f64).abs() <= 1e-9,
        || format!("first prediction {first} != 1/(T+1)"),
    );

    let mut learner = LearnerSpec::ContinuousEw.build(t, LossKind::Squared).unwrap();
    let mut adversary = AdversarySpec::GdKillerZeros
        .build(t, OrderOverride::Default, 0, 0)
        .unwrap();
    let game = run_game(learner.as_mut(), adversary.as_mut(), LossKind::Squared).unwrap();
    let mut late_min = f64::INFINITY;
    for record in &game.transcript.trials {
        if record.trial > t / 2 {
            late_min = late_min.min(record.prediction);
            check.require(record.prediction >= 0.125, || {
                format!("trial {}: prediction {} < 1/8", record.trial, record.prediction)
            });
        }
    }
    check.require(game.learner_loss >= t as f64 / 128.0 - 1e-9, || {
        format!("total loss {} < T/128", game.learner_loss)
    });
    check.note(format!(
        "late predictions >= {late_min:.4}; total loss {:.2} >= {}",
        game.learner_loss,
        t / 128
    ));
    check.finish()
}

// ---------------------------------------------------------------------------
// 6. Arbitrary-order minimax
// ---------------------------------------------------------------------------

fn check_anyorder_minimax(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("anyorder-minimax-value", title);

    let values = anyorder_minimax_values(2048);
    for (n, &v) in values.iter().enumerate() {
        check.require(v <= 0.25 * ((n + 1) as f64).log2() + 1e-12, || {
            format!("value coefficient at n={n} exceeds log2(n+1)/4")
        });
    }

    for &t in &[1usize, 3, 7, 15, 31, 63] {
        let mut learner = LearnerSpec::MinimaxAny.build(t, LossKind::Squared).unwrap();
        let mut adversary = AdversarySpec::MidpointSplitter
            .build(t, OrderOverride::Default, 0, 0)
            .unwrap();
        let game = run_game(learner.as_mut(), adversary.as_mut(), LossKind::Squared).unwrap();
        let value = 0.25 * ((t + 1) as f64).log2();
        check.require((game.learner_loss - value).abs() <= 1e-8, || {
            format!("t={t}: loss {} != {value}", game.learner_loss)
        });
        check.require(game.oracle_loss.abs() <= 1e-12, || {
            format!("t={t}: splitter labels were not noise-free")
        });
    }

    // random noise-free sequences in random orders never beat the value
    let mut games = 0;
    for round in 0..100u64 {
        let t = [1usize, 3, 7, 15, 31, 63][(round % 6) as usize];
        let mut rng = adversaries::derive_rng(SUITE_SEED, 600 + round);
        let labels = adversaries::random_isotonic(t, &mut rng);
        let order = adversaries::random_order(t, &mut rng);
        let mut learner = LearnerSpec::MinimaxAny.build(t, LossKind::Squared).unwrap();
        let mut adversary = adversaries::Scripted::new(labels, order, "random-noise-free");
        let game = run_game(learner.as_mut(), &mut adversary, LossKind::Squared).unwrap();
        let cap = 0.25 * ((t + 1) as f64).log2();
        check.require(game.learner_loss <= cap + 1e-8, || {
            format!("round {round} t={t}: loss {} > {cap}", game.learner_loss)
        });
        games += 1;
    }
    check.note(format!(
        "value exact on doubling horizons; {games} random noise-free games under the cap; coefficients bounded to n=2048"
    ));
    check.finish()
}

// ---------------------------------------------------------------------------
// 7. Left-to-right minimax
// ---------------------------------------------------------------------------

fn check_isotonic_minimax(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("isotonic-minimax-value", title);

    let values = isotonic_minimax_values(1_000_000);
    let mut monotone = true;
    let mut bounded = true;
    for w in values.windows(2).skip(1) {
        monotone &= w[0] <= w[1];
    }
    for &v in &values {
        bounded &= v <= 1.0;
    }
    check.require(monotone, || "game values are not monotone".into());
    check.require(bounded, || "a game value exceeds 1".into());

    #[allow(clippy::needless_range_loop)] // t is a horizon, not just an index
    for t in 1..=64usize {
        let alpha = values[t];
        let mut learner = LearnerSpec::MinimaxIso.build(t, LossKind::Squared).unwrap();
        let mut adversary = AdversarySpec::GreedyIso
            .build(t, OrderOverride::Default, 0, 0)
            .unwrap();
        let game = run_game(learner.as_mut(), adversary.as_mut(), LossKind::Squared).unwrap();
        check.require((game.learner_loss - alpha).abs() <= 1e-9, || {
            format!("t={t}: minimax loss {} != {alpha}", game.learner_loss)
        });

        // the same adversary forces at least the value out of anyone
        let mut net = LearnerSpec::EwNet { k: None }.build(t, LossKind::Squared).unwrap();
        let mut adversary = AdversarySpec::GreedyIso
            .build(t, OrderOverride::Default, 0, 0)
            .unwrap();
        let other = run_game(net.as_mut(), adversary.as_mut(), LossKind::Squared).unwrap();
        check.require(other.learner_loss >= alpha - 1e-9, || {
            format!("t={t}: net forecaster lost {} < {alpha}", other.learner_loss)
        });
    }
    check.note("exact value at every T <= 64; table monotone and <= 1 to n = 10^6".to_string());
    check.finish()
}

// ---------------------------------------------------------------------------
// 8. Entropic net bound
// ---------------------------------------------------------------------------

fn check_entropic_net_bound(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("entropic-net-bound", title);
    let mut games = 0;
    for &t in &[64usize, 128, 256, 512, 1024, 2048] {
        for seed in 0..10u64 {
            let mut rng = adversaries::derive_rng(SUITE_SEED, 800 + seed);
            // interior labels so every entropic quantity is finite
            let labels: Vec<f64> = adversaries::random_isotonic(t, &mut rng)
                .labels()
                .iter()
                .map(|&y| 0.02 + 0.96 * y)
                .collect();
            let order = if seed % 2 == 0 {
                RevealOrder::isotonic(t)
            } else {
                adversaries::random_order(t, &mut rng)
            };
            let mut adversary = adversaries::Scripted::new(
                LabelSequence::new(labels).unwrap(),
                order,
                "interior-random",
            );
            let mut learner = LearnerSpec::EwEntropic { k: None }
                .build(t, LossKind::Entropic)
                .unwrap();
            let game = run_game(learner.as_mut(), &mut adversary, LossKind::Entropic).unwrap();
            let bound = net::entropic_net_regret_bound(t);
            check.require(game.regret <= bound + 1e-9, || {
                format!("t={t} seed={seed}: regret {} > bound {bound}", game.regret)
            });
            games += 1;
        }
    }
    check.note(format!("{games} interior-label games, zero bound violations"));
    check.finish()
}

// ---------------------------------------------------------------------------
// 9. Exponentiated gradient
// ---------------------------------------------------------------------------

fn check_eg(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("eg-regret", title);

    // squared loss: the closed-form bound across the whole adversary matrix
    let mut games = 0;
    for &t in &[64usize, 256, 1024, 4096] {
        let bound = eg::squared_regret_bound(t);
        let mut runs: Vec<(String, Box<dyn adversaries::Adversary>)> = Vec::new();
        for seed in 0..3u64 {
            runs.push((
                format!("lb-segments/{seed}"),
                AdversarySpec::LbSegments { k: None, omega: None }
                    .build(t, OrderOverride::Default, SUITE_SEED, seed)
                    .unwrap(),
            ));
            runs.push((
                format!("random-iso/{seed}"),
                AdversarySpec::RandomIso
                    .build(t, OrderOverride::Default, SUITE_SEED, 30 + seed)
                    .unwrap(),
            ));
            runs.push((
                format!("random-iso-shuffled/{seed}"),
                AdversarySpec::RandomIso
                    .build(t, OrderOverride::Random, SUITE_SEED, 60 + seed)
                    .unwrap(),
            ));
            runs.push((
                format!("noisy-iso/{seed}"),
                AdversarySpec::NoisyIso { sigma: 0.25 }
                    .build(t, OrderOverride::Default, SUITE_SEED, 90 + seed)
                    .unwrap(),
            ));
        }
        runs.push((
            "gd-killer-zeros".into(),
            AdversarySpec::GdKillerZeros
                .build(t, OrderOverride::Default, 0, 0)
                .unwrap(),
        ));
        runs.push((
            "gd-killer-ones".into(),
            AdversarySpec::GdKillerOnes
                .build(t, OrderOverride::Default, 0, 0)
                .unwrap(),
        ));
        runs.push((
            "midpoint-splitter".into(),
            AdversarySpec::MidpointSplitter
                .build(t, OrderOverride::Default, 0, 0)
                .unwrap(),
        ));
        runs.push((
            "greedy-iso".into(),
            AdversarySpec::GreedyIso
                .build(t, OrderOverride::Default, 0, 0)
                .unwrap(),
        ));
        for (label, mut adversary) in runs {
            let mut learner = LearnerSpec::Eg { eta: None }.build(t, LossKind::Squared).unwrap();
            let game = run_game(learner.as_mut(), adversary.as_mut(), LossKind::Squared).unwrap();
            check.require(game.regret <= bound + 1e-9, || {
                format!("{label} t={t}: regret {} > bound {bound}", game.regret)
            });
            games += 1;
        }
    }

    // absolute loss: worst-over-seeds regret grows no faster than T^0.6
    let mut points = Vec::new();
    for &t in &[64usize, 128, 256, 512, 1024] {
        let mut worst = f64::NEG_INFINITY;
        for seed in 0..10u64 {
            let mut rng = adversaries::derive_rng(SUITE_SEED, 900 + seed);
            let labels: Vec<f64> = (0..t).map(|_| rng.gen::<f64>()).collect();
            let order = adversaries::random_order(t, &mut rng);
            let mut adversary = adversaries::Scripted::new(
                LabelSequence::new(labels).unwrap(),
                order,
                "uniform-random",
            );
            let mut learner = LearnerSpec::Eg { eta: None }
                .build(t, LossKind::Absolute)
                .unwrap();
            let game = run_game(learner.as_mut(), &mut adversary, LossKind::Absolute).unwrap();
            worst = worst.max(game.regret);
        }
        points.push((t as f64, worst));
    }
    match engine::fit_loglog(&points) {
        Some(fit) => {
            check.require(fit.slope <= 0.6, || {
                format!("absolute-loss regret exponent {} > 0.6", fit.slope)
            });
            check.note(format!(
                "{games} squared games under the bound; absolute exponent {:.3}",
                fit.slope
            ));
        }
        None => check.require(false, || "absolute-loss fit had no positive points".into()),
    }
    check.finish()
}

// ---------------------------------------------------------------------------
// 10. Discretization gap
// ---------------------------------------------------------------------------

fn check_discretization(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("discretization-gap", title);
    let mut rng = adversaries::derive_rng(SUITE_SEED, 10);
    let mut max_gap_ratio: f64 = 0.0;
    for _ in 0..1000 {
        let t = rng.gen_range(1..=100);
        let k = rng.gen_range(1..=10);
        let labels: Vec<f64> = (0..t).map(|_| rng.gen::<f64>()).collect();
        let report = engine::discretization_gap(&labels, k).unwrap();
        let cap = t as f64 / (4.0 * (k * k) as f64);
        max_gap_ratio = max_gap_ratio.max(report.gap / cap);
        check.require(report.gap <= cap + 1e-9, || {
            format!("t={t} k={k}: gap {} > {cap}", report.gap)
        });
        check.require(
            (report.gap - report.grid_distance_sq).abs() <= 1e-10,
            || {
                format!(
                    "t={t} k={k}: gap {} != squared distance {}",
                    report.gap, report.grid_distance_sq
                )
            },
        );
    }
    // labels already monotone on the grid fit themselves: zero gap
    for _ in 0..100 {
        let t = rng.gen_range(1..=50);
        let k = rng.gen_range(1..=10);
        let mut labels: Vec<f64> = (0..t)
            .map(|_| rng.gen_range(0..=k) as f64 / k as f64)
            .collect();
        labels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let report = engine::discretization_gap(&labels, k).unwrap();
        check.require(report.gap.abs() <= 1e-12, || {
            format!("grid labels t={t} k={k}: gap {}", report.gap)
        });
    }
    check.note(format!(
        "1000 random + 100 on-grid instances; max gap/cap ratio {max_gap_ratio:.3}"
    ));
    check.finish()
}

// ---------------------------------------------------------------------------
// 11. Cube-root rate
// ---------------------------------------------------------------------------

fn check_lower_bound_rate(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("lower-bound-rate", title);
    let fit = lb_sweep().fits[0]
        .max_fit
        .expect("hard-instance sweep has positive regrets");
    check.require((0.25..=0.50).contains(&fit.slope), || {
        format!("fitted exponent {} outside [0.25, 0.50]", fit.slope)
    });
    check.note(format!(
        "worst-over-{LB_SEEDS}-seeds exponent {:.3} over T in 2^6..2^13 (residual rms {:.3})",
        fit.slope, fit.residual_rms
    ));
    check.finish()
}

// ---------------------------------------------------------------------------
// 12. PAVA oracle properties
// ---------------------------------------------------------------------------

fn check_pava(title: &'static str) -> CheckOutcome {
    let mut check = Check::new("pava-oracle", title);
    let mut rng = adversaries::derive_rng(SUITE_SEED, 12);

    // level-set means on a thousand weighted instances
    for _ in 0..1000 {
        let t = rng.gen_range(1..=50);
        let labels: Vec<f64> = (0..t).map(|_| rng.gen::<f64>()).collect();
        let weights: Vec<f64> = (0..t).map(|_| rng.gen::<f64>() + 0.05).collect();
        let fit = pava(&labels, &weights).unwrap();
        check.require(
            fit.values().windows(2).all(|w| w[0] <= w[1]),
            || "fit is not monotone".into(),
        );
        for set in fit.level_sets() {
            let w: f64 = weights[set.start..set.end].iter().sum();
            let mean: f64 = labels[set.start..set.end]
                .iter()
                .zip(&weights[set.start..set.end])
                .map(|(&y, &ww)| ww * y)
                .sum::<f64>()
                / w;
            check.require((mean - set.value).abs() <= 1e-12, || {
                format!("level-set mean {mean} != value {}", set.value)
            });
        }
    }

    // optimality against a dense grid, squared and entropic
    let grid = bruteforce::uniform_levels(0.05);
    let interior: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    for _ in 0..200 {
        let t = rng.gen_range(1..=6);
        let labels: Vec<f64> = (0..t).map(|_| rng.gen::<f64>()).collect();
        let fit = pava_unit(&labels).unwrap();
        let mine: f64 = labels
            .iter()
            .zip(fit.values())
            .map(|(&y, &p)| (y - p) * (y - p))
            .sum();
        let best = bruteforce::min_isotonic_loss_on_grid(&labels, LossKind::Squared, &grid);
        check.require(mine <= best + 1e-12, || {
            format!("squared fit {mine} beaten by grid {best}")
        });

        let interior_labels: Vec<f64> = labels.iter().map(|&y| 0.05 + 0.9 * y).collect();
        let fit = pava_unit(&interior_labels).unwrap();
        let mine: f64 = interior_labels
            .iter()
            .zip(fit.values())
            .map(|(&y, &p)| loss(LossKind::Entropic, y, p).unwrap())
            .sum();
        let best =
            bruteforce::min_isotonic_loss_on_grid(&interior_labels, LossKind::Entropic, &interior);
        check.require(mine <= best + 1e-12, || {
            format!("entropic fit {mine} beaten by grid {best}")
        });
    }

    // projection is nearest-point
    for _ in 0..200 {
        let t = rng.gen_range(1..=6);
        let point: Vec<f64> = (0..t).map(|_| rng.gen::<f64>() * 2.0 - 0.5).collect();
        let proj = project_isotonic_box(&point);
        let mine: f64 = point
            .iter()
            .zip(proj.values())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum();
        let best = bruteforce::nearest_isotonic_distance_on_grid(&point, &grid);
        check.require(mine <= best + 1e-9, || {
            format!("projection distance {mine} beaten by grid {best}")
        });
    }

    // L1 fit matches exhaustive enumeration on three-level sequences
    let levels = [0.0, 0.5, 1.0];
    for t in 1..=6usize {
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
            let want = bruteforce::min_isotonic_loss_on_grid(&labels, LossKind::Absolute, &levels);
            check.require((got - want).abs() <= 1e-12, || {
                format!("L1 fit {got} != exhaustive {want} on {labels:?}")
            });
        }
    }

    // the two comparator routes agree: transcripts scored by the oracle
    let labels = [0.0, 1.0, 0.0, 1.0];
    let l = best_isotonic_loss(&labels, LossKind::Squared).unwrap();
    check.require((l - 0.5).abs() <= 1e-12, || {
        format!("frozen comparator value 0.5 violated: {l}")
    });

    check.note("means, grid optimality (squared + entropic), projection, L1, frozen values".to_string());
    check.finish()
}
