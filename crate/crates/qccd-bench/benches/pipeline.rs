use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qccd_bench::{linear, qft_dag};
use qccd_core::physics::{accumulate_fidelity, PhysicsParams};
use qccd_core::router::{route, PlacementStrategy};
use qccd_core::scoring::ScoreWeights;
use qccd_core::sweep::{staged_optimize, StagePlan, SweepContext};

fn bench_fidelity_accumulation(c: &mut Criterion) {
    let dag = qft_dag(16);
    let machine = linear(4, 6);
    let trace = route(&dag, &machine, &ScoreWeights::default(), PlacementStrategy::Sequential, 42)
        .unwrap();
    let params = PhysicsParams::default();
    c.bench_function("accumulate_fidelity_qft16", |b| {
        b.iter(|| accumulate_fidelity(black_box(&trace), &params).unwrap())
    });
}

fn bench_sweep_stage(c: &mut Criterion) {
    let dag = qft_dag(8);
    let machine = linear(4, 3);
    let physics = PhysicsParams::default();
    let plan = StagePlan {
        swap_grid: vec![1.0, 30.0, 65.0],
        shuttle_grid: vec![30.0, 100.0, 180.0],
        threshold_grid: vec![-350.0, -60.0],
        parallelism_grid: vec![1.0, 10.0],
        future_ops_grid: vec![1.0],
        excess_capacity_grid: vec![1.0, 10.0],
        retain_k: 4,
        lookahead: 7,
    };
    c.bench_function("staged_sweep_qft8_coarse", |b| {
        b.iter(|| {
            let ctx = SweepContext {
                dag: &dag,
                machine: &machine,
                physics: &physics,
                placement: PlacementStrategy::Sequential,
                seed: 42,
            };
            staged_optimize(black_box(&plan), &ctx).unwrap()
        })
    });
}

criterion_group!(benches, bench_fidelity_accumulation, bench_sweep_stage);
criterion_main!(benches);
