use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use recgame_core::generators::{gen_tight_poa, random_game, random_profile, RandomGameConfig};
use recgame_core::upoa::{min_utility_curve_with, solve_stationary_with, SolveOptions};
use recgame_core::{enumerate_pne, price_of_anarchy, run_dynamics, DynamicsConfig, MediatorKind, Rational};

fn equilibria(c: &mut Criterion) {
    let g = gen_tight_poa::<Rational>(5).unwrap();
    c.bench_function("enumerate_pne/tight_poa_5", |b| {
        b.iter(|| enumerate_pne(black_box(&g), MediatorKind::Shapley, 1 << 20).unwrap())
    });
    c.bench_function("price_of_anarchy/tight_poa_5", |b| {
        b.iter(|| price_of_anarchy(black_box(&g), MediatorKind::Shapley, 1 << 20).unwrap())
    });

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = random_game(&mut rng, &RandomGameConfig::default().with_players(4..=4));
    let start = random_profile(&g, &mut rng);
    c.bench_function("run_dynamics/random_4_players", |b| {
        b.iter(|| run_dynamics(black_box(&g), MediatorKind::Shapley, &start, &DynamicsConfig::default()).unwrap())
    });
}

fn stationary(c: &mut Criterion) {
    let no_sampling = SolveOptions {
        minimality_samples: 0,
        ..SolveOptions::default()
    };
    c.bench_function("solve_stationary/n=200", |b| {
        b.iter(|| solve_stationary_with(black_box(200), &no_sampling).unwrap())
    });
    let mut group = c.benchmark_group("min_utility_curve");
    group.sample_size(10);
    group.bench_function("n_max=300", |b| {
        b.iter(|| min_utility_curve_with(black_box(300), &no_sampling).unwrap())
    });
    group.finish();
}

criterion_group!(benches, equilibria, stationary);
criterion_main!(benches);
