use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use recgame_core::generators::{gen_example1, gen_impossibility, random_game, random_profile, RandomGameConfig};
use recgame_core::{
    build_congestion_game, congestion_payoffs, enumerate_pne, is_pne, payoff_vector, potential_value, run_dynamics,
    DynamicsConfig, Game, MediatorKind, Rational, ResponseRule, Scalar, Schedule, StrategyProfile,
};

const CAP: u128 = 100_000;

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn games(seed: u64, count: usize, cfg: &RandomGameConfig) -> Vec<Game<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_game(&mut rng, cfg)).collect()
}

#[test]
fn potential_maximizers_are_equilibria() {
    for g in games(11, 60, &RandomGameConfig::default()) {
        let profiles: Vec<StrategyProfile> = g.enumerate_profiles(CAP).unwrap().collect();
        let phis: Vec<Rational> = profiles.iter().map(|x| potential_value(&g, x)).collect();
        let best = phis.iter().copied().fold(phis[0], Rational::max_of);
        let pne = enumerate_pne(&g, MediatorKind::Shapley, CAP).unwrap();
        assert!(!pne.is_empty());
        for (x, phi) in profiles.iter().zip(&phis) {
            if *phi == best {
                assert!(pne.contains(x), "argmax Φ {} is not a PNE", g.profile_label(x));
            }
        }
    }
}

#[test]
fn every_rule_and_schedule_converges_within_the_profile_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for g in games(12, 80, &RandomGameConfig::default()) {
        let start = random_profile(&g, &mut rng);
        for schedule in [Schedule::RoundRobin, Schedule::Random] {
            for rule in [ResponseRule::Better, ResponseRule::Best] {
                let cfg = DynamicsConfig {
                    schedule,
                    rule,
                    seed: 3,
                    max_steps: 100_000,
                };
                let trace = run_dynamics(&g, MediatorKind::Shapley, &start, &cfg).unwrap();
                assert!(trace.converged);
                assert!(is_pne(&g, MediatorKind::Shapley, &trace.terminal));
                // Φ strictly increases, so no profile is visited twice.
                assert!((trace.step_count() as u128) < g.profile_space_size());
                for step in &trace.steps {
                    assert!(step.payoff_delta > Rational::zero());
                    assert_eq!(step.potential_delta, Some(step.payoff_delta));
                }
            }
        }
    }
}

#[test]
fn dynamics_are_deterministic_given_the_seed() {
    let g = &games(13, 1, &RandomGameConfig::default())[0];
    let start = StrategyProfile(vec![0; g.num_players()]);
    let cfg = DynamicsConfig {
        schedule: Schedule::Random,
        seed: 99,
        ..DynamicsConfig::default()
    };
    let a = run_dynamics(g, MediatorKind::Shapley, &start, &cfg).unwrap();
    let b = run_dynamics(g, MediatorKind::Shapley, &start, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn top_does_not_settle_on_the_impossibility_instance() {
    let g = gen_impossibility(r(9, 10), r(1, 2)).unwrap();
    assert!(enumerate_pne(&g, MediatorKind::Top, CAP).unwrap().is_empty());
    assert!(!enumerate_pne(&g, MediatorKind::Shapley, CAP).unwrap().is_empty());
    for start in g.enumerate_profiles(CAP).unwrap() {
        let cfg = DynamicsConfig {
            max_steps: 10_000,
            ..DynamicsConfig::default()
        };
        let trace = run_dynamics(&g, MediatorKind::Top, &start, &cfg).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.step_count(), 10_000);
        assert!(trace.steps.iter().all(|s| s.potential_delta.is_none()));
    }
}

#[test]
fn example_two_trace() {
    let g = gen_example1();
    let start = g.parse_profile("l1,l3").unwrap();
    let trace = run_dynamics(&g, MediatorKind::Shapley, &start, &DynamicsConfig::default()).unwrap();
    assert_eq!(g.profile_label(&trace.terminal), "l2,l3");
    assert_eq!(trace.step_count(), 1);
    assert_eq!(trace.steps[0].payoff_delta, r(9, 10));

    let mut buf = Vec::new();
    trace.write_csv(&g, &mut buf).unwrap();
    let mut rows = csv::Reader::from_reader(buf.as_slice());
    let row = rows.records().next().unwrap().unwrap();
    assert_eq!(&row[1], "p1");
    assert_eq!(&row[3], "l2");
}

#[test]
fn float_potential_tracks_payoffs() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for g in games(14, 40, &RandomGameConfig::default()) {
        let gf = g.to_float();
        let x = random_profile(&gf, &mut rng);
        let pv = payoff_vector(&gf, MediatorKind::Shapley, &x);
        for j in 0..gf.num_players() {
            for s in 0..gf.strategies(j).len() {
                let y = x.with_choice(j, s);
                let dpi = payoff_vector(&gf, MediatorKind::Shapley, &y).payoffs[j] - pv.payoffs[j];
                let dphi = potential_value(&gf, &y) - potential_value(&gf, &x);
                assert!((dpi - dphi).abs() <= 1e-12);
            }
        }
    }
}

fn arb_personalized() -> impl Strategy<Value = (Game<Rational>, u64)> {
    (any::<u64>(), any::<u64>()).prop_map(|(g, p)| {
        (
            random_game(&mut ChaCha8Rng::seed_from_u64(g), &RandomGameConfig::personalized()),
            p,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn personalized_potential_is_exact((g, seed) in arb_personalized()) {
        let x = random_profile(&g, &mut ChaCha8Rng::seed_from_u64(seed));
        let pv = payoff_vector(&g, MediatorKind::Shapley, &x);
        let phi = potential_value(&g, &x);
        for j in 0..g.num_players() {
            for s in 0..g.strategies(j).len() {
                let y = x.with_choice(j, s);
                let dpi = payoff_vector(&g, MediatorKind::Shapley, &y).payoffs[j] - pv.payoffs[j];
                prop_assert_eq!(dpi, potential_value(&g, &y) - phi);
            }
        }
    }

    #[test]
    fn congestion_reduction_agrees((g, seed) in arb_personalized()) {
        let x = random_profile(&g, &mut ChaCha8Rng::seed_from_u64(seed));
        let cg = build_congestion_game(&g);
        prop_assert_eq!(congestion_payoffs(&cg, &x), payoff_vector(&g, MediatorKind::Shapley, &x));
        prop_assert_eq!(cg.potential(&x), potential_value(&g, &x));
    }
}
