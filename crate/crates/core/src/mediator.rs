//! Mediators: rules mapping one user's satisfaction levels to a display
//! distribution over players and "no item".

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::game::{Game, SortedLevels, StrategyProfile};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediatorKind {
    /// Uniform over the most satisfying players.
    Top,
    /// Proportional to satisfaction (Bradley-Terry-Luce).
    Btl,
    /// Never displays anything.
    None,
    /// Uniform over players with positive satisfaction.
    Rand,
    /// Shapley value of the induced cooperative game.
    Shapley,
}

impl MediatorKind {
    pub const ALL: [MediatorKind; 5] = [
        MediatorKind::Top,
        MediatorKind::Btl,
        MediatorKind::None,
        MediatorKind::Rand,
        MediatorKind::Shapley,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MediatorKind::Top => "top",
            MediatorKind::Btl => "btl",
            MediatorKind::None => "none",
            MediatorKind::Rand => "rand",
            MediatorKind::Shapley => "shapley",
        }
    }
}

impl fmt::Display for MediatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MediatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "top" => Ok(MediatorKind::Top),
            "btl" => Ok(MediatorKind::Btl),
            "none" => Ok(MediatorKind::None),
            "rand" => Ok(MediatorKind::Rand),
            "shapley" | "sm" => Ok(MediatorKind::Shapley),
            other => Err(format!(
                "unknown mediator {other:?} (expected top, btl, none, rand or shapley)"
            )),
        }
    }
}

/// Display probabilities for one user under one profile.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplayDistribution<S> {
    pub per_player: Vec<S>,
    pub none_prob: S,
}

impl<S: Scalar> DisplayDistribution<S> {
    fn nothing(players: usize) -> Self {
        DisplayDistribution {
            per_player: vec![S::zero(); players],
            none_prob: S::one(),
        }
    }

    fn from_player_probs(per_player: Vec<S>) -> Self {
        let shown: S = per_player.iter().copied().sum();
        DisplayDistribution {
            per_player,
            none_prob: S::one() - shown,
        }
    }

    /// Total probability that some item is displayed.
    pub fn displayed(&self) -> S {
        self.per_player.iter().copied().sum()
    }

    pub fn total(&self) -> S {
        self.displayed() + self.none_prob
    }

    /// Probabilities of players `0..N` followed by the no-item outcome.
    pub fn outcome_probs(&self) -> Vec<S> {
        let mut v = self.per_player.clone();
        v.push(self.none_prob);
        v
    }
}

/// Display distribution of mediator `kind` for the satisfaction vector
/// `(σ(X_1), …, σ(X_N))` of a single user.
pub fn mediate<S: Scalar>(kind: MediatorKind, sats: &[S]) -> DisplayDistribution<S> {
    let n = sats.len();
    let top = sats.iter().fold(S::zero(), |acc, v| acc.max_of(*v));
    match kind {
        MediatorKind::None => DisplayDistribution::nothing(n),
        // All-zero vectors show nothing under every mediator.
        _ if top.is_zero() => DisplayDistribution::nothing(n),
        MediatorKind::Top => {
            let leaders = sats.iter().filter(|v| **v == top).count();
            let share = S::one() / S::from_int(leaders as i64);
            DisplayDistribution::from_player_probs(
                sats.iter().map(|v| if *v == top { share } else { S::zero() }).collect(),
            )
        }
        MediatorKind::Btl => {
            let total: S = sats.iter().copied().sum();
            DisplayDistribution::from_player_probs(sats.iter().map(|v| *v / total).collect())
        }
        MediatorKind::Rand => {
            let positive = sats.iter().filter(|v| !v.is_zero()).count();
            let share = S::one() / S::from_int(positive as i64);
            DisplayDistribution::from_player_probs(
                sats.iter()
                    .map(|v| if v.is_zero() { S::zero() } else { share })
                    .collect(),
            )
        }
        MediatorKind::Shapley => shapley_distribution(&SortedLevels::from_values(sats)),
    }
}

/// Closed-form Shapley display probabilities:
/// `P(j) = Σ_{m=1}^{rank_j} (σ^m − σ^{m−1}) / (N − m + 1)` and `P(∅) = 1 − σ^N`.
///
/// Linear in N once the levels are sorted.
pub fn shapley_distribution<S: Scalar>(levels: &SortedLevels<S>) -> DisplayDistribution<S> {
    let n = levels.num_players();
    // cumulative[m] = probability of a player ranked m
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(S::zero());
    for m in 1..=n {
        let step = (levels.levels[m] - levels.levels[m - 1]) / S::from_int((n - m + 1) as i64);
        cumulative.push(cumulative[m - 1] + step);
    }
    DisplayDistribution {
        per_player: levels.rank.iter().map(|&r| cumulative[r]).collect(),
        none_prob: S::one() - levels.top(),
    }
}

/// Outcome of one recommendation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Player(usize),
    Nothing,
}

/// One draw of the Shapley mediator: pick `Y ~ U(0,1)`; show nothing when
/// `Y` exceeds the best level, otherwise pick uniformly among the players
/// whose level is at least `Y`.
pub fn shapley_sample<S: Scalar, R: Rng + ?Sized>(levels: &SortedLevels<S>, rng: &mut R) -> Outcome {
    let y: f64 = rng.sample(Open01);
    if y > levels.top().to_f64() {
        return Outcome::Nothing;
    }
    // levels[1..] is ascending, so the eligible ranks form a suffix.
    let n = levels.num_players();
    let first = levels.levels[1..].partition_point(|v| v.to_f64() < y) + 1;
    let pick_rank = first + rng.random_range(0..=(n - first));
    let player = levels
        .rank
        .iter()
        .position(|&r| r == pick_rank)
        .expect("every rank belongs to a player");
    Outcome::Player(player)
}

/// Empirical check of [`shapley_sample`] against the closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerFit {
    pub draws: u64,
    /// Players `0..N` followed by the no-item outcome.
    pub counts: Vec<u64>,
    pub empirical: Vec<f64>,
    pub exact: Vec<f64>,
    pub total_variation: f64,
    /// `|empirical P(∅) − (1 − σ^N)|`.
    pub none_gap: f64,
}

pub fn sampler_fit<S: Scalar, R: Rng + ?Sized>(levels: &SortedLevels<S>, draws: u64, rng: &mut R) -> SamplerFit {
    let n = levels.num_players();
    let mut counts = vec![0u64; n + 1];
    for _ in 0..draws {
        match shapley_sample(levels, rng) {
            Outcome::Player(j) => counts[j] += 1,
            Outcome::Nothing => counts[n] += 1,
        }
    }
    let exact: Vec<f64> = shapley_distribution(levels)
        .outcome_probs()
        .iter()
        .map(S::to_f64)
        .collect();
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / draws.max(1) as f64).collect();
    let total_variation = 0.5 * empirical.iter().zip(&exact).map(|(e, p)| (e - p).abs()).sum::<f64>();
    SamplerFit {
        draws,
        none_gap: (empirical[n] - exact[n]).abs(),
        counts,
        empirical,
        exact,
        total_variation,
    }
}

/// Display distribution for `user` in `game` under `profile`.
pub fn display_distribution<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    profile: &StrategyProfile,
    user: usize,
) -> DisplayDistribution<S> {
    mediate(kind, &game.profile_sats(profile, user))
}
