//! Compares the data-parallel drivers against single-threaded execution
//! on the three hot paths: prior sweeps, the brute-force oracle, and the
//! Monte Carlo simulator.
//!
//! With the default `parallel` feature the baseline runs in a one-thread
//! rayon pool; without the feature both sides take the sequential
//! fallback, which keeps the bench compilable either way.

use cheaptalk::envelopes::sweep;
use cheaptalk::game::Belief;
use cheaptalk::rational::rat;
use cheaptalk::solver::solve;
use cheaptalk::verification::{brute_force_solve, fixtures, simulate, OracleConfig};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

#[cfg(feature = "parallel")]
fn run_single_threaded<T>(f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool construction")
        .install(f)
}

#[cfg(not(feature = "parallel"))]
fn run_single_threaded<T>(f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    f()
}

fn bench_sweep(c: &mut Criterion) {
    let game = fixtures::g5();
    let mut group = c.benchmark_group("sweep_g5_99");
    group.bench_function("parallel", |b| b.iter(|| black_box(sweep(&game, 99))));
    group.bench_function("single_thread", |b| {
        b.iter(|| run_single_threaded(|| black_box(sweep(&game, 99))))
    });
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let game = fixtures::g2();
    let prior = Belief::new(rat(1, 2)).unwrap();
    let config = OracleConfig {
        mixture_denom: 200,
        scan_denom: 100,
        float_tolerance: 1e-9,
    };
    let mut group = c.benchmark_group("oracle_g2_200");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(brute_force_solve(&game, &prior, &config)))
    });
    group.bench_function("single_thread", |b| {
        b.iter(|| run_single_threaded(|| black_box(brute_force_solve(&game, &prior, &config))))
    });
    group.finish();
}

fn bench_simulate(c: &mut Criterion) {
    let game = fixtures::g1();
    let prior = Belief::new(rat(1, 2)).unwrap();
    let solution = solve(&game, &prior);
    let mut group = c.benchmark_group("simulate_g1_100k");
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(simulate(&game, &prior, &solution, 100_000, 7)))
    });
    group.bench_function("single_thread", |b| {
        b.iter(|| run_single_threaded(|| black_box(simulate(&game, &prior, &solution, 100_000, 7))))
    });
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_oracle, bench_simulate);
criterion_main!(benches);
