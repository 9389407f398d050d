use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optbench_core::optimizers::surrogate::fit_quadratic_at;
use optbench_core::{
    default_hyperparameters, run_optimizer, CostModelParams, ObjectiveEngine, OptimizerConfig, OptimizerKind,
    ProblemKind, ProblemSetup, ProblemSpec,
};
use std::hint::black_box;
use std::sync::Arc;

fn setup(kind: ProblemKind, p: usize) -> Arc<ProblemSetup> {
    Arc::new(ProblemSetup::build(&ProblemSpec::new(kind, p)).unwrap())
}

fn prepare(c: &mut Criterion) {
    let mut g = c.benchmark_group("prepare_state");
    for (kind, p) in
        [(ProblemKind::MaxCut3Reg, 1), (ProblemKind::Sk, 5), (ProblemKind::Hubbard, 1), (ProblemKind::Hubbard, 5)]
    {
        let s = setup(kind, p);
        let x = s.initial_guess.clone();
        g.bench_with_input(BenchmarkId::new(kind.name(), p), &x, |b, x| b.iter(|| s.state(black_box(x)).unwrap()));
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("query_energy");
    for shots in [1_000u64, 100_000] {
        let s = setup(ProblemKind::Sk, 1);
        let x = s.initial_guess.clone();
        let mut e = ObjectiveEngine::with_defaults(s, 0).unwrap();
        g.bench_with_input(BenchmarkId::new("sk_sampled", shots), &shots, |b, &m| {
            b.iter(|| e.query_energy(black_box(&x), m).unwrap())
        });
    }
    let s = setup(ProblemKind::Hubbard, 1);
    let x = s.initial_guess.clone();
    let mut e = ObjectiveEngine::with_defaults(s, 0).unwrap();
    g.bench_function("hubbard_gaussian", |b| b.iter(|| e.query_energy(black_box(&x), 1_000_000).unwrap()));
    g.finish();
}

fn surrogate(c: &mut Criterion) {
    let mut g = c.benchmark_group("quadratic_fit");
    for dim in [2usize, 10] {
        // deterministic scatter around the origin
        let n = (dim + 1) * (dim + 2) / 2 + 5;
        let pts: Vec<(Vec<f64>, f64)> = (0..n)
            .map(|i| {
                let x: Vec<f64> = (0..dim).map(|j| ((i * 7 + j * 13) % 17) as f64 / 17.0 - 0.5).collect();
                let v = x.iter().map(|u| u * u).sum::<f64>() + x[0];
                (x, v)
            })
            .collect();
        let center = vec![0.0; dim];
        g.bench_with_input(BenchmarkId::from_parameter(dim), &pts, |b, pts| {
            b.iter(|| fit_quadratic_at(black_box(pts), &center, 0.5))
        });
    }
    g.finish();
}

fn optimizer_runs(c: &mut Criterion) {
    let mut g = c.benchmark_group("optimizer_20_evals");
    g.sample_size(10);
    let s = setup(ProblemKind::Sk, 1);
    for kind in OptimizerKind::ALL {
        let mut hp = default_hyperparameters(ProblemKind::Sk, 1, kind).unwrap();
        hp.insert("max_evals".into(), 20.0);
        let cfg = OptimizerConfig::from_map(kind, &hp).unwrap();
        g.bench_function(kind.name(), |b| {
            b.iter(|| {
                let mut e = ObjectiveEngine::with_defaults(s.clone(), 0).unwrap();
                run_optimizer(&cfg, &mut e, &s.initial_guess, CostModelParams::default(), None, 0).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, prepare, sampling, surrogate, optimizer_runs);
criterion_main!(benches);
