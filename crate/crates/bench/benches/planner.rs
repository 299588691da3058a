use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use p2d2_core::env::{sample_initial, sample_state};
use p2d2_core::envs::make_env;
use p2d2_core::planner::{grow_tree, PlannerConfig};
use p2d2_core::rng::rng_from_seed;

fn grow(c: &mut Criterion) {
    let mut group = c.benchmark_group("grow_tree");
    group.sample_size(10);
    for name in ["mountaincar", "pendulum", "acrobot", "cartpole_swingup"] {
        let env = make_env(name).unwrap();
        let cfg = PlannerConfig { budget_k: 5000, seed: 1, ..Default::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &env, |b, env| {
            b.iter(|| {
                let mut rng = rng_from_seed(1);
                let root = sample_initial(env.spec(), &mut rng);
                black_box(grow_tree(env.as_ref(), &cfg, root, &mut rng).unwrap().len())
            })
        });
    }
    group.finish();
}

fn nearest(c: &mut Criterion) {
    let env = make_env("acrobot").unwrap();
    let cfg = PlannerConfig { budget_k: 10_000, seed: 2, ..Default::default() };
    let mut rng = rng_from_seed(2);
    let root = sample_initial(env.spec(), &mut rng);
    let tree = grow_tree(env.as_ref(), &cfg, root, &mut rng).unwrap();
    let queries: Vec<_> = (0..1000).map(|_| sample_state(env.spec(), &mut rng)).collect();
    c.bench_function("nearest/acrobot_10k_x1000", |b| {
        b.iter(|| queries.iter().map(|q| tree.nearest(q, 0.0)).sum::<usize>())
    });
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for name in ["mountaincar", "pendulum", "acrobot", "cartpole_swingup"] {
        let env = make_env(name).unwrap();
        let mut rng = rng_from_seed(3);
        let s = sample_state(env.spec(), &mut rng);
        let a = p2d2_core::env::sample_action(env.spec(), &mut rng);
        group.bench_function(name, |b| b.iter(|| env.step(black_box(&s), black_box(&a)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, grow, nearest, step);
criterion_main!(benches);
