use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qccd_bench::{grid, linear, qft_dag, rnd_dag};
use qccd_core::router::{route, PlacementStrategy};
use qccd_core::scoring::ScoreWeights;

fn bench_route_qft(c: &mut Criterion) {
    let mut group = c.benchmark_group("route_qft");
    for n in [8usize, 16, 24] {
        let dag = qft_dag(n);
        let machine = linear(n / 4, 6);
        let weights = ScoreWeights::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                route(
                    black_box(&dag),
                    black_box(&machine),
                    &weights,
                    PlacementStrategy::Sequential,
                    42,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_route_random_on_grid(c: &mut Criterion) {
    let dag = rnd_dag(16, 7);
    let machine = grid(2, 4, 3);
    let weights = ScoreWeights::default();
    c.bench_function("route_rnd16_grid2x4", |b| {
        b.iter(|| {
            route(
                black_box(&dag),
                black_box(&machine),
                &weights,
                PlacementStrategy::Sequential,
                42,
            )
            .unwrap()
        })
    });
}

fn bench_shortest_paths(c: &mut Criterion) {
    let machine = grid(4, 4, 4);
    c.bench_function("all_shortest_paths_grid4x4_corner", |b| {
        b.iter(|| {
            machine.all_shortest_paths(
                black_box(qccd_core::topology::TrapId(0)),
                black_box(qccd_core::topology::TrapId(15)),
            )
        })
    });
}

criterion_group!(benches, bench_route_qft, bench_route_random_on_grid, bench_shortest_paths);
criterion_main!(benches);
