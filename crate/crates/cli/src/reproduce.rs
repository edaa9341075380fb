//! The paper-reproduction table: every published example and bound, each
//! recomputed through the library and compared with the published value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recgame_core::generators::{
    gen_example1, gen_impossibility, gen_prop6, gen_prop7, gen_tight_poa, random_game, random_profile, RandomGameConfig,
};
use recgame_core::upoa::{min_utility_curve_with, solve_stationary_with, SolveOptions};
use recgame_core::{
    enumerate_pne, format_scalar, payoff_vector, price_of_anarchy, shapley_bruteforce, shapley_distribution,
    sorted_levels, user_price_of_anarchy, user_utility, DisplayDistribution, Game, MediatorKind, PoARatio, Rational,
    Result, Scalar, SortedLevels, StrategyProfile, UtilityConfig, DEFAULT_ENUMERATION_CAP as CAP,
};

/// Closed-form Shapley display probabilities, injectable so that a corrupted
/// formula can be shown to fail the table.
pub type ClosedForm = fn(&SortedLevels<Rational>) -> DisplayDistribution<Rational>;

#[derive(Clone, Copy, Debug)]
pub struct ReproduceOptions {
    /// Largest N on the utility curve.
    pub n_max: usize,
    pub minimality_samples: usize,
    pub seed: u64,
    pub closed_form: ClosedForm,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            n_max: 1000,
            minimality_samples: SolveOptions::default().minimality_samples,
            seed: 0,
            closed_form: shapley_distribution::<Rational>,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub id: &'static str,
    pub claim: &'static str,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn list<S: Scalar>(values: &[S]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" / ")
}

fn labels<S: Scalar>(g: &Game<S>, profiles: &[StrategyProfile]) -> String {
    let v: Vec<String> = profiles.iter().map(|x| format!("({})", g.profile_label(x))).collect();
    format!("{{{}}}", v.join(" "))
}

fn row(id: &'static str, claim: &'static str, expected: impl Into<String>, observed: Result<(String, bool)>) -> Row {
    let (observed, pass) = observed.unwrap_or_else(|e| (format!("error: {e}"), false));
    Row {
        id,
        claim,
        expected: expected.into(),
        observed,
        pass,
    }
}

/// Runs the whole suite; never panics on a mismatch.
pub fn reproduce_paper(opts: &ReproduceOptions) -> Vec<Row> {
    let g = gen_example1();
    let x13 = g.parse_profile("l1,l3").expect("example profile");
    let x23 = g.parse_profile("l2,l3").expect("example profile");
    let zero = UtilityConfig::zero();
    let mut rows = Vec::new();

    let probs: Vec<Rational> = (0..3)
        .map(|u| (opts.closed_form)(&sorted_levels(&g, &x23, u)).per_player[0])
        .collect();
    let want = [r(2, 5), r(7, 20), r(17, 20)];
    rows.push(row(
        "example2-probabilities",
        "player 1 display probabilities under (l2,l3) for u1..u3",
        list(&want),
        Ok((list(&probs), probs == want)),
    ));

    let p23 = payoff_vector(&g, MediatorKind::Shapley, &x23).payoffs[0];
    let p13 = payoff_vector(&g, MediatorKind::Shapley, &x13).payoffs[0];
    rows.push(row(
        "example2-payoffs",
        "player 1 payoff under (l2,l3) and (l1,l3)",
        "8/5 / 7/10",
        Ok((list(&[p23, p13]), (p23, p13) == (r(8, 5), r(7, 10)))),
    ));

    rows.push(row(
        "example2-equilibria",
        "the Shapley game has the unique PNE (l2,l3)",
        "{(l2,l3)}",
        enumerate_pne(&g, MediatorKind::Shapley, CAP).map(|p| (labels(&g, &p), p == [x23.clone()])),
    ));

    let u = user_utility(&g, MediatorKind::Shapley, &x23, &zero);
    rows.push(row(
        "example2-utility",
        "user utility at the Shapley PNE",
        "429/200 (2.145)",
        Ok((format_scalar(&u), u == r(429, 200))),
    ));

    rows.push(row(
        "example1-top",
        "TOP: unique PNE (l1,l3) with utility 2; (l2,l3) would give 2.6",
        "{(l1,l3)}; 2 / 13/5",
        enumerate_pne(&g, MediatorKind::Top, CAP).map(|p| {
            let a = user_utility(&g, MediatorKind::Top, &x13, &zero);
            let b = user_utility(&g, MediatorKind::Top, &x23, &zero);
            (
                format!("{}; {}", labels(&g, &p), list(&[a, b])),
                p == [x13.clone()] && a == r(2, 1) && b == r(13, 5),
            )
        }),
    ));

    rows.push(row(
        "oracle-equivalence",
        "closed form equals the permutation-average Shapley value",
        "0 mismatches",
        oracle_mismatches(opts).map(|(checked, bad)| (format!("{bad} mismatches in {checked} vectors"), bad == 0)),
    ));

    let imp = gen_impossibility(r(9, 10), r(1, 2)).expect("parameters in (0,1]");
    for (id, kind, claim) in [
        ("impossibility-top", MediatorKind::Top, "x=0.9, y=0.5: TOP has no PNE"),
        ("impossibility-btl", MediatorKind::Btl, "x=0.9, y=0.5: BTL has no PNE"),
    ] {
        rows.push(row(
            id,
            claim,
            "0 equilibria",
            enumerate_pne(&imp, kind, CAP).map(|p| (format!("{} equilibria", p.len()), p.is_empty())),
        ));
    }
    rows.push(row(
        "impossibility-shapley",
        "x=0.9, y=0.5: the Shapley mediator has a PNE",
        "≥ 1 equilibria",
        enumerate_pne(&imp, MediatorKind::Shapley, CAP).map(|p| (format!("{} equilibria", p.len()), !p.is_empty())),
    ));

    rows.push(row(
        "tight-poa",
        "star instance: PoA = (2N-1)/N for N = 2..6",
        "3/2 5/3 7/4 9/5 11/6",
        (2..=6)
            .map(|n| {
                let res = price_of_anarchy(&gen_tight_poa::<Rational>(n)?, MediatorKind::Shapley, CAP)?;
                let want = r(2 * n as i128 - 1, n as i128);
                Ok((res.ratio.to_string(), res.ratio == PoARatio::Finite(want)))
            })
            .collect::<Result<Vec<(String, bool)>>>()
            .map(|v| {
                let pass = v.iter().all(|(_, p)| *p);
                (v.into_iter().map(|(s, _)| s).collect::<Vec<_>>().join(" "), pass)
            }),
    ));

    rows.push(row(
        "prop6-upoa",
        "one user, eps = 0.01: UPoA of the Shapley mediator ≥ 1/eps",
        "≥ 100",
        gen_prop6(r(1, 100))
            .and_then(|g| user_price_of_anarchy(&g, MediatorKind::Shapley, &zero, CAP))
            .map(|res| {
                (
                    res.ratio.to_string(),
                    res.ratio.finite().is_some_and(|v| v >= r(100, 1)),
                )
            }),
    ));

    rows.push(row(
        "prop7-upoa",
        "delta = 0.01, eps = 0.005: UPoA of TOP = (1+eps)/(2 delta)",
        "201/4",
        gen_prop7(r(1, 100), r(1, 200))
            .and_then(|g| user_price_of_anarchy(&g, MediatorKind::Top, &zero, CAP))
            .map(|res| (res.ratio.to_string(), res.ratio == PoARatio::Finite(r(201, 4)))),
    ));

    rows.push(row(
        "optimal-plain-content",
        "plain utility 1: U ≥ n/4 on every profile and UPoA ≤ 4 (100 random games)",
        "0 violations",
        lemma_violations(opts.seed).map(|bad| (format!("{bad} violations"), bad == 0)),
    ));

    let n1 = solve_stationary_with(
        1,
        &SolveOptions {
            minimality_samples: opts.minimality_samples,
            seed: opts.seed,
        },
    );
    rows.push(row(
        "stationary-n1",
        "one player: stationary point 1/2 with utility 3/4",
        "0.5 / 0.75",
        n1.map(|p| {
            (
                format!("{} / {}", p.sigma[0], p.utility),
                p.sigma[0] == 0.5 && p.utility == 0.75,
            )
        }),
    ));

    let curve = min_utility_curve_with(
        opts.n_max,
        &SolveOptions {
            minimality_samples: opts.minimality_samples,
            seed: opts.seed,
        },
    );
    rows.push(row(
        "utility-curve",
        "minimum utility over N ≤ n_max is at least 0.568, so UPoA ≤ 1.761",
        "min ≥ 0.568; bound ≤ 1.7615",
        curve.map(|points| {
            let worst = points
                .iter()
                .min_by(|a, b| a.utility.total_cmp(&b.utility))
                .expect("curve has at least one point");
            (
                format!(
                    "min {:.6} at N={}; bound {:.6}",
                    worst.utility, worst.players, worst.upoa_bound
                ),
                worst.utility >= 0.568 && worst.upoa_bound <= 1.7605 + 1e-3,
            )
        }),
    ));

    rows
}

fn oracle_mismatches(opts: &ReproduceOptions) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cfg = RandomGameConfig::default().with_players(1..=6);
    let (mut checked, mut bad) = (0, 0);
    for _ in 0..200 {
        let g = random_game(&mut rng, &cfg);
        for _ in 0..3 {
            let x = random_profile(&g, &mut rng);
            for u in 0..g.num_users() {
                let closed = (opts.closed_form)(&sorted_levels(&g, &x, u)).per_player;
                checked += 1;
                if closed != shapley_bruteforce(&g, &x, u)? {
                    bad += 1;
                }
            }
        }
    }
    Ok((checked, bad))
}

fn lemma_violations(seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let cfg = UtilityConfig::optimal_plain_content();
    let mut bad = 0;
    for _ in 0..100 {
        let g = random_game(&mut rng, &RandomGameConfig::default());
        let quarter = r(g.num_users() as i128, 4);
        for x in g.enumerate_profiles(CAP)? {
            if user_utility(&g, MediatorKind::Shapley, &x, &cfg) < quarter {
                bad += 1;
            }
        }
        let res = user_price_of_anarchy(&g, MediatorKind::Shapley, &cfg, CAP)?;
        if !res.ratio.finite().is_some_and(|v| v <= r(4, 1)) {
            bad += 1;
        }
    }
    Ok(bad)
}
