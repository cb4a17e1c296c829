//! Sequential vs data-parallel sweep execution, plus the two hot kernels.
//!
//! Run with `cargo bench -p oir-core`; disable the default `parallel`
//! feature to time the sequential fallback alone.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use oir_core::adversaries::{derive_rng, AdversarySpec, OrderOverride};
use oir_core::engine::{sweep, ExecMode, SweepConfig};
use oir_core::learners::ew_net::EwNet;
use oir_core::learners::LearnerSpec;
use oir_core::loss::LossKind;
use oir_core::oracle::pava_unit;
use rand::Rng;

fn sweep_config(mode: ExecMode) -> SweepConfig {
    SweepConfig {
        horizons: vec![128, 256],
        seeds: (0..8).collect(),
        learners: vec![LearnerSpec::EwNet { k: None }],
        adversaries: vec![AdversarySpec::LbSegments { k: None, omega: None }],
        order: OrderOverride::Default,
        kind: LossKind::Squared,
        master_seed: 7,
        mode,
    }
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("exec", "sequential"), |b| {
        let cfg = sweep_config(ExecMode::Sequential);
        b.iter(|| sweep(&cfg).unwrap());
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("exec", "parallel"), |b| {
        let cfg = sweep_config(ExecMode::Parallel);
        b.iter(|| sweep(&cfg).unwrap());
    });
    group.finish();
}

fn bench_net_prediction(c: &mut Criterion) {
    let t = 1024;
    let mut learner = EwNet::squared(t, None).unwrap();
    let mut rng = derive_rng(3, 0);
    for pos in 0..t / 2 {
        learner.observe_at(pos, rng.gen()).unwrap();
    }
    c.bench_function("ew_net_predict/t1024", |b| {
        b.iter(|| learner.predict_at(t - 1).unwrap())
    });
}

fn bench_pava(c: &mut Criterion) {
    let mut rng = derive_rng(4, 0);
    let labels: Vec<f64> = (0..10_000).map(|_| rng.gen()).collect();
    c.bench_function("pava/t10000", |b| b.iter(|| pava_unit(&labels).unwrap()));
}

criterion_group!(benches, bench_sweep, bench_net_prediction, bench_pava);
criterion_main!(benches);
