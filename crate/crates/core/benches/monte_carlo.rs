use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mlexp_core::numeric::etas::standardize;
use mlexp_core::numeric::family::{Builtin, LocationFamily};
use mlexp_core::numeric::montecarlo::{monte_carlo_cdf, Grid, McConfig, Parallelism};

fn bench(c: &mut Criterion) {
    let grid = "-4:4:0.1".parse::<Grid>().expect("grid").points();
    let mut group = c.benchmark_group("monte_carlo_cdf");
    group.sample_size(10);
    for b in [Builtin::Logistic, Builtin::Cauchy] {
        let fam = standardize(&LocationFamily::builtin(b)).expect("standardize");
        for parallelism in [Parallelism::Sequential, Parallelism::Parallel] {
            let cfg = McConfig { n: 20, reps: 20_000, seed: 1, grid: grid.clone(), parallelism };
            group.bench_with_input(BenchmarkId::new(format!("{parallelism:?}"), b), &cfg, |bench, cfg| {
                bench.iter(|| monte_carlo_cdf(&fam, cfg).expect("report"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
