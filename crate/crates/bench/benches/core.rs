use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use qube_core::cube::Phase;
use qube_core::ddqn::PhaseConfig;
use qube_core::hamiltonian::{total_energy, CoefficientSet};
use qube_core::moves::{phase_actions, scramble};
use qube_core::neural::{sgd_step, AdamState, BatchCache, MlpModel};
use qube_core::oracle::{bfs_solve, BfsOutcome};

fn bench_apply(c: &mut Criterion) {
    let actions = phase_actions(Phase::OrientEdges);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (state, _) = scramble(&mut rng, &actions, 30);
    c.bench_function("apply 12 generators", |b| {
        b.iter(|| {
            let mut s = state;
            for a in &actions {
                s = a.compiled.apply(&s);
            }
            black_box(s)
        })
    });
}

fn bench_energy(c: &mut Criterion) {
    let actions = phase_actions(Phase::OrientEdges);
    let coeffs = CoefficientSet::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (state, _) = scramble(&mut rng, &actions, 30);
    c.bench_function("total energy", |b| {
        b.iter(|| black_box(total_energy(black_box(&state), &coeffs)))
    });
}

fn bench_forward(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = PhaseConfig::defaults(Phase::PositionEdges);
    let model = MlpModel::init(4, cfg.dims, &mut rng).unwrap();
    let obs = vec![0.5; cfg.dims[0]];
    c.bench_function("phase-4 forward", |b| {
        b.iter(|| black_box(model.forward(black_box(&obs)).unwrap()))
    });
}

fn bench_sgd_step(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = PhaseConfig::defaults(Phase::OrientEdges);
    let model = MlpModel::init(1, cfg.dims, &mut rng).unwrap();
    let n = cfg.batch_size;
    let obs: Vec<f64> = (0..n * cfg.dims[0]).map(|i| (i % 3) as f64 - 1.0).collect();
    let actions: Vec<usize> = (0..n).map(|i| i % cfg.dims[3]).collect();
    let targets: Vec<f64> = (0..n).map(|i| -((i % 20) as f64)).collect();
    c.bench_function("phase-1 sgd step (batch 1240)", |b| {
        b.iter_batched(
            || (model.clone(), AdamState::new(&model), BatchCache::default()),
            |(mut m, mut adam, mut ws)| {
                sgd_step(&mut m, &mut adam, &obs, n, &actions, &targets, 1e-4, &mut ws).unwrap()
            },
            BatchSize::LargeInput,
        )
    });
}

fn bench_bfs(c: &mut Criterion) {
    let actions = phase_actions(Phase::OrientEdges);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (state, _) = scramble(&mut rng, &actions, 3);
    c.bench_function("bfs depth 3", |b| {
        b.iter(|| {
            match bfs_solve(black_box(&state), &actions, 3, 10_000_000, |s| s.is_solved()) {
                BfsOutcome::Solved(seq) => black_box(seq.len()),
                other => panic!("{other:?}"),
            }
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_apply, bench_energy, bench_forward, bench_sgd_step, bench_bfs
}
criterion_main!(benches);
