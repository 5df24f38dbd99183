use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use funcord::sweep::{run_suite, run_suite_sequential, Suite};

const SEED: u64 = 7;
const TOL: f64 = 1e-9;

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(10);
    for (suite, cases) in [(Suite::Commutative, 100), (Suite::Matrix, 100), (Suite::Trend, 5)] {
        let name = format!("{suite:?}").to_lowercase();
        group.bench_with_input(BenchmarkId::new("parallel", &name), &cases, |b, &n| {
            b.iter(|| run_suite(suite, n, SEED, TOL))
        });
        group.bench_with_input(BenchmarkId::new("sequential", &name), &cases, |b, &n| {
            b.iter(|| run_suite_sequential(suite, n, SEED, TOL))
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
