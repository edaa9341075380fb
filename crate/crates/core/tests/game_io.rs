use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use recgame_core::generators::{gen_example1, random_game, random_profile, RandomGameConfig};
use recgame_core::{parse_game, sorted_levels, AnyGame, Error, Game, Mode, Rational, SortedLevels, StrategyProfile};

const EXAMPLE1: &str = r#"{
  "mode": "single",
  "users": ["u1", "u2", "u3"],
  "items": {
    "l1": {"u1": "0.1", "u2": "0.9", "u3": "0.2"},
    "l2": {"u1": "0.8", "u2": "0.7", "u3": "0.9"},
    "l3": {"u1": "9/10", "u2": "4/5", "u3": "1/10"}
  },
  "players": [
    {"name": "p1", "menu": ["l1", "l2"]},
    {"name": "p2", "menu": ["l3"]}
  ]
}"#;

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn exact(doc: &str) -> Game<Rational> {
    match parse_game(doc.as_bytes()).unwrap() {
        AnyGame::Exact(g) => g,
        AnyGame::Float(_) => panic!("expected an exact game"),
    }
}

#[test]
fn example_document_matches_generator() {
    let g = exact(EXAMPLE1);
    assert_eq!(g.num_players(), 2);
    assert_eq!(g.num_users(), 3);
    assert_eq!(g, gen_example1());
    let profiles: Vec<String> = g.enumerate_profiles(10).unwrap().map(|x| g.profile_label(&x)).collect();
    assert_eq!(profiles, ["l1,l3", "l2,l3"]);
}

#[test]
fn out_of_range_satisfaction_is_reported_with_path() {
    let doc = EXAMPLE1.replace(r#""u2": "0.7""#, r#""u2": 1.2"#);
    let err = parse_game(doc.as_bytes()).unwrap_err();
    assert!(
        matches!(err, Error::SatisfactionOutOfRange { ref path, .. } if path == "items.l2.u2"),
        "{err}"
    );
    assert!(err.to_string().contains("satisfaction outside [0,1]"));
}

#[test]
fn personalized_budget_above_menu_is_rejected() {
    let doc = EXAMPLE1
        .replace(r#""mode": "single""#, r#""mode": "personalized""#)
        .replace(r#""menu": ["l1", "l2"]}"#, r#""menu": ["l1", "l2"], "budget": 3}"#);
    let err = parse_game(doc.as_bytes()).unwrap_err();
    assert!(
        matches!(
            err,
            Error::BudgetOutOfRange {
                budget: 3,
                menu_len: 2,
                ..
            }
        ),
        "{err}"
    );
    assert!(err.to_string().contains("budget out of range"));
    assert!(err.to_string().starts_with("players[0]"), "{err}");
}

#[test]
fn budget_is_ignored_in_single_mode() {
    let doc = EXAMPLE1.replace(r#""menu": ["l1", "l2"]}"#, r#""menu": ["l1", "l2"], "budget": 3}"#);
    assert!(parse_game(doc.as_bytes()).is_ok());
}

#[test]
fn structural_errors() {
    let unknown = EXAMPLE1.replace(r#"["l3"]"#, r#"["l9"]"#);
    let err = parse_game(unknown.as_bytes()).unwrap_err();
    assert!(
        matches!(err, Error::UnknownItem { ref item, .. } if item == "l9"),
        "{err}"
    );

    let empty = EXAMPLE1.replace(r#"["l3"]"#, "[]");
    assert!(matches!(
        parse_game(empty.as_bytes()).unwrap_err(),
        Error::EmptyMenu { .. }
    ));

    let stray_user = EXAMPLE1.replace(r#""u3": "0.2""#, r#""u3": "0.2", "u7": "0.5""#);
    assert!(matches!(
        parse_game(stray_user.as_bytes()).unwrap_err(),
        Error::UnknownUser { .. }
    ));

    let missing = EXAMPLE1.replace(r#", "u3": "0.2""#, "");
    let err = parse_game(missing.as_bytes()).unwrap_err();
    assert!(err.to_string().contains("items.l1.u3"), "{err}");

    assert!(matches!(parse_game(b"[1, 2]").unwrap_err(), Error::Schema { .. }));
    assert!(matches!(parse_game(b"{not json").unwrap_err(), Error::Schema { .. }));
}

#[test]
fn float_numbers_make_a_float_game() {
    let doc = EXAMPLE1.replace(r#""0.1""#, "0.1");
    match parse_game(doc.as_bytes()).unwrap() {
        AnyGame::Float(g) => assert_eq!(g.sat(0, 0), 0.1),
        AnyGame::Exact(_) => panic!("0.1 as a JSON number is a float"),
    }
    // Integers stay exact.
    let doc = EXAMPLE1.replace(r#""0.1""#, "0");
    assert!(matches!(parse_game(doc.as_bytes()).unwrap(), AnyGame::Exact(_)));
}

#[test]
fn satisfaction_of_item_sets() {
    let g = gen_example1();
    let (l1, l2) = (g.item_index("l1").unwrap(), g.item_index("l2").unwrap());
    assert_eq!(g.satisfaction_of_strategy(0, &[l2]).unwrap(), r(4, 5));
    assert_eq!(g.satisfaction_of_strategy(0, &[l1, l2]).unwrap(), r(4, 5));
    assert_eq!(g.satisfaction_of_strategy(0, &[]).unwrap(), r(0, 1));
    assert!(g.satisfaction_of_strategy(7, &[l1]).is_err());
    assert!(g.satisfaction_of_strategy(0, &[42]).is_err());
}

#[test]
fn personalized_strategy_count() {
    let doc = r#"{"mode": "personalized", "users": ["u"],
        "items": {"a": {"u": "0.1"}, "b": {"u": "0.2"}, "c": {"u": "0.3"}},
        "players": [{"name": "p", "menu": ["a", "b", "c"], "budget": 2}]}"#;
    let g = exact(doc);
    let labels: Vec<String> = (0..g.strategies(0).len()).map(|s| g.strategy_label(0, s)).collect();
    assert_eq!(labels, ["a", "b", "c", "a+b", "a+c", "b+c"]);
    assert_eq!(g.profile_space_size(), 6);
    assert_eq!(g.parse_profile("c+a").unwrap(), StrategyProfile(vec![4]));
    assert!(g.parse_profile("a+b+c").is_err());
}

#[test]
fn levels_of_example_two() {
    let g = gen_example1();
    let x = g.parse_profile("l2,l3").unwrap();
    let lv = sorted_levels(&g, &x, 2);
    assert_eq!(lv.levels, [r(0, 1), r(1, 10), r(9, 10)]);
    assert_eq!(lv.rank, [2, 1]);

    let c = r(2, 5);
    assert_eq!(SortedLevels::from_values(&[c, c, c]).levels, [r(0, 1), c, c, c]);
    let lv = SortedLevels::from_values(&[r(3, 10), r(1, 2), r(7, 10)]);
    assert_eq!(lv.rank, [1, 2, 3]);
}

#[test]
fn enumeration_cap() {
    let g = gen_example1();
    assert!(matches!(
        g.enumerate_profiles(1),
        Err(Error::CapExceeded { size: 2, cap: 1 })
    ));
}

fn arb_game(personalized: bool) -> impl Strategy<Value = Game<Rational>> {
    any::<u64>().prop_map(move |seed| {
        let cfg = if personalized {
            RandomGameConfig::personalized()
        } else {
            RandomGameConfig::default()
        };
        random_game(&mut ChaCha8Rng::seed_from_u64(seed), &cfg)
    })
}

proptest! {
    #[test]
    fn exact_round_trip(g in arb_game(false)) {
        let text = g.to_json().to_string();
        prop_assert_eq!(parse_game(text.as_bytes()).unwrap(), AnyGame::Exact(g));
    }

    #[test]
    fn personalized_round_trip(g in arb_game(true)) {
        prop_assert_eq!(g.mode(), Mode::Personalized);
        let text = g.to_json().to_string();
        prop_assert_eq!(parse_game(text.as_bytes()).unwrap(), AnyGame::Exact(g));
    }

    #[test]
    fn float_round_trip(g in arb_game(false)) {
        let gf = g.to_float();
        let text = gf.to_json().to_string();
        prop_assert_eq!(parse_game(text.as_bytes()).unwrap(), AnyGame::Float(gf));
    }

    #[test]
    fn levels_ignore_player_order(values in prop::collection::vec(0i128..=20, 1..8), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let vals: Vec<Rational> = values.iter().map(|&v| r(v, 20)).collect();
        let mut shuffled = vals.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = SortedLevels::from_values(&vals);
        let b = SortedLevels::from_values(&shuffled);
        prop_assert_eq!(&a.levels, &b.levels);
        for (j, v) in vals.iter().enumerate() {
            prop_assert_eq!(a.value_of(j), *v);
        }
    }

    #[test]
    fn adding_items_never_hurts(g in arb_game(true), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_profile(&g, &mut rng);
        for (j, &s) in x.choices().iter().enumerate() {
            let base: Vec<usize> = g.strategies(j)[s].items().to_vec();
            for &extra in &g.players()[j].menu {
                let mut bigger = base.clone();
                bigger.push(extra);
                for u in 0..g.num_users() {
                    prop_assert!(g.satisfaction_of_strategy(u, &bigger).unwrap() >= g.satisfaction_of_strategy(u, &base).unwrap());
                }
            }
        }
    }
}
