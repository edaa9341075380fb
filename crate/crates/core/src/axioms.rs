//! Property checks for mediators: the fairness axioms, efficiency,
//! completeness and stability, each reported with its first counterexample.

use std::fmt;

use rand::Rng;

use crate::dynamics::{enumerate_pne, find_deviation_cycle};
use crate::error::Error;
use crate::game::{Game, StrategyProfile, DEFAULT_ENUMERATION_CAP};
use crate::generators::random_profile;
use crate::mediator::{display_distribution, MediatorKind};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    NullPlayer,
    Symmetry,
    UserIndependence,
    LeaderMonotonicity,
    Efficiency,
    Complete,
    Stability,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::NullPlayer,
        Axiom::Symmetry,
        Axiom::UserIndependence,
        Axiom::LeaderMonotonicity,
        Axiom::Efficiency,
        Axiom::Complete,
        Axiom::Stability,
    ];

    /// The four axioms that make up fairness.
    pub const FAIRNESS: [Axiom; 4] = [
        Axiom::NullPlayer,
        Axiom::Symmetry,
        Axiom::UserIndependence,
        Axiom::LeaderMonotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::NullPlayer => "null-player",
            Axiom::Symmetry => "symmetry",
            Axiom::UserIndependence => "user-independence",
            Axiom::LeaderMonotonicity => "leader-monotonicity",
            Axiom::Efficiency => "efficiency",
            Axiom::Complete => "complete",
            Axiom::Stability => "stability",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample<S> {
    pub game_index: usize,
    pub game: Game<S>,
    pub profile: StrategyProfile,
    /// `None` for stability violations, which concern the whole game.
    pub user: Option<usize>,
    pub satisfactions: Vec<S>,
    /// Display probabilities of players `0..N` followed by the no-item outcome.
    pub probabilities: Vec<S>,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct AxiomOutcome<S> {
    pub axiom: Axiom,
    /// Number of (game, profile, user) instances — or games, for
    /// stability — on which the axiom was evaluated.
    pub checked: usize,
    /// Games skipped because their profile space exceeds the enumeration cap.
    pub skipped: usize,
    pub counterexample: Option<Counterexample<S>>,
}

impl<S> AxiomOutcome<S> {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport<S> {
    pub kind: MediatorKind,
    pub outcomes: Vec<AxiomOutcome<S>>,
}

impl<S> AxiomReport<S> {
    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome<S> {
        self.outcomes
            .iter()
            .find(|o| o.axiom == axiom)
            .expect("report covers every axiom")
    }

    pub fn passes(&self, axiom: Axiom) -> bool {
        self.outcome(axiom).passed()
    }

    pub fn fair(&self) -> bool {
        Axiom::FAIRNESS.iter().all(|&a| self.passes(a))
    }
}

fn strictly_greater<S: Scalar>(a: S, b: S) -> bool {
    a > b && !a.approx_eq(&b)
}

struct Recorder<S> {
    outcomes: Vec<AxiomOutcome<S>>,
}

impl<S: Scalar> Recorder<S> {
    fn new() -> Self {
        Recorder {
            outcomes: Axiom::ALL
                .iter()
                .map(|&axiom| AxiomOutcome {
                    axiom,
                    checked: 0,
                    skipped: 0,
                    counterexample: None,
                })
                .collect(),
        }
    }

    fn slot(&mut self, axiom: Axiom) -> &mut AxiomOutcome<S> {
        self.outcomes.iter_mut().find(|o| o.axiom == axiom).unwrap()
    }

    fn record(&mut self, axiom: Axiom, violation: Option<impl FnOnce() -> Counterexample<S>>) {
        let slot = self.slot(axiom);
        slot.checked += 1;
        if slot.counterexample.is_none() {
            if let Some(make) = violation {
                slot.counterexample = Some(make());
            }
        }
    }
}

/// Checks every axiom of [`Axiom::ALL`] for mediator `kind`: the per-user
/// axioms on `trials` random profiles of each game (every user of each
/// profile), stability by exhaustive PNE enumeration of each game.
pub fn check_axioms<S: Scalar, R: Rng + ?Sized>(
    kind: MediatorKind,
    games: &[Game<S>],
    trials: usize,
    rng: &mut R,
) -> AxiomReport<S> {
    let mut rec = Recorder::new();
    for (gi, game) in games.iter().enumerate() {
        for _ in 0..trials.max(1) {
            let profile = random_profile(game, rng);
            for user in 0..game.num_users() {
                check_user(kind, gi, game, &profile, user, rng, &mut rec);
            }
        }
        check_stability(kind, gi, game, &mut rec);
    }
    AxiomReport {
        kind,
        outcomes: rec.outcomes,
    }
}

fn check_user<S: Scalar, R: Rng + ?Sized>(
    kind: MediatorKind,
    gi: usize,
    game: &Game<S>,
    profile: &StrategyProfile,
    user: usize,
    rng: &mut R,
    rec: &mut Recorder<S>,
) {
    let sats = game.profile_sats(profile, user);
    let dist = display_distribution(game, kind, profile, user);
    let p = &dist.per_player;
    let n = sats.len();
    let witness = |detail: String| {
        let sats = sats.clone();
        let probabilities = dist.outcome_probs();
        move || Counterexample {
            game_index: gi,
            game: game.clone(),
            profile: profile.clone(),
            user: Some(user),
            satisfactions: sats,
            probabilities,
            detail,
        }
    };

    let null = (0..n).find(|&j| sats[j].is_zero() && !p[j].is_zero());
    rec.record(
        Axiom::NullPlayer,
        null.map(|j| witness(format!("player {j} has zero satisfaction but probability {}", p[j]))),
    );

    let asym = (0..n)
        .flat_map(|j| (j + 1..n).map(move |m| (j, m)))
        .find(|&(j, m)| sats[j] == sats[m] && !p[j].approx_eq(&p[m]));
    rec.record(
        Axiom::Symmetry,
        asym.map(|(j, m)| witness(format!("players {j} and {m} tie but get {} and {}", p[j], p[m]))),
    );

    let top = sats.iter().fold(S::zero(), |a, v| a.max_of(*v));
    let leaders: Vec<usize> = (0..n).filter(|&j| sats[j] == top).collect();
    let lm = leaders
        .iter()
        .flat_map(|&j| (0..n).filter(|&m| sats[m] != top).map(move |m| (j, m)))
        .find(|&(j, m)| !strictly_greater(p[j], p[m]));
    rec.record(
        Axiom::LeaderMonotonicity,
        lm.map(|(j, m)| witness(format!("leader {j} gets {} but non-leader {m} gets {}", p[j], p[m]))),
    );

    let shown = dist.displayed();
    rec.record(
        Axiom::Efficiency,
        (!shown.approx_eq(&top))
            .then(|| witness(format!("displayed mass {shown} differs from top satisfaction {top}"))),
    );
    if !top.is_zero() {
        rec.record(
            Axiom::Complete,
            (!shown.approx_eq(&S::one())).then(|| witness(format!("displayed mass {shown} below one"))),
        );
    }

    // Remove another user, or add a fresh one, and recompute.
    let altered = if game.num_users() > 1 && rng.random_bool(0.5) {
        let mut other = rng.random_range(0..game.num_users() - 1);
        if other >= user {
            other += 1;
        }
        let g = game.without_user(other).ok();
        g.map(|g| {
            (
                g,
                if other < user { user - 1 } else { user },
                format!("removing user {other}"),
            )
        })
    } else {
        let row: Vec<S> = (0..game.items().len())
            .map(|_| S::from_ratio(rng.random_range(0..=100), 100))
            .collect();
        let g = game.with_extra_user("u+", &row).ok();
        g.map(|g| (g, user, "adding a user".to_string()))
    };
    if let Some((g, idx, how)) = altered {
        let again = display_distribution(&g, kind, profile, idx);
        let changed = again
            .outcome_probs()
            .iter()
            .zip(dist.outcome_probs())
            .any(|(a, b)| !a.approx_eq(&b));
        rec.record(
            Axiom::UserIndependence,
            changed.then(|| witness(format!("probabilities change after {how}"))),
        );
    }
}

fn check_stability<S: Scalar>(kind: MediatorKind, gi: usize, game: &Game<S>, rec: &mut Recorder<S>) {
    match enumerate_pne(game, kind, DEFAULT_ENUMERATION_CAP) {
        Ok(pne) => {
            let violation = pne.is_empty().then(|| {
                let start = game.profile_at(0);
                let steps = game.profile_space_size().min(1 << 24) as usize * game.num_players() + 2;
                let cycle = find_deviation_cycle(game, kind, &start, steps).unwrap_or_default();
                let labels: Vec<String> = cycle.iter().map(|x| game.profile_label(x)).collect();
                move || Counterexample {
                    game_index: gi,
                    game: game.clone(),
                    profile: cycle.first().cloned().unwrap_or(start),
                    user: None,
                    satisfactions: Vec::new(),
                    probabilities: Vec::new(),
                    detail: format!("no pure Nash equilibrium; deviation cycle {}", labels.join(" -> ")),
                }
            });
            rec.record(Axiom::Stability, violation);
        }
        Err(Error::CapExceeded { .. }) => rec.slot(Axiom::Stability).skipped += 1,
        Err(e) => panic!("unexpected error while enumerating equilibria: {e}"),
    }
}
