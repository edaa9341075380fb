//! Social welfare, user utility, and the two price-of-anarchy measures.

use std::fmt;
use std::io::Write;

use crate::dynamics::{find_deviation_cycle, payoff_vector, scan_profiles};
use crate::error::{Error, Result};
use crate::game::{Game, StrategyProfile};
use crate::mediator::{display_distribution, MediatorKind};
use crate::scalar::{format_scalar, Scalar};

/// Utility a user derives when nothing is displayed, uniform across users.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtilityConfig<S> {
    plain: S,
}

impl<S: Scalar> UtilityConfig<S> {
    pub fn new(plain: S) -> Result<Self> {
        if plain < S::zero() || plain > S::one() {
            return Err(Error::InvalidArgument(format!("plain utility {plain} outside [0,1]")));
        }
        Ok(UtilityConfig { plain })
    }

    /// `σ(∅) = 0`.
    pub fn zero() -> Self {
        UtilityConfig { plain: S::zero() }
    }

    /// `σ(∅) = 1`: displaying nothing is the best a user can get.
    pub fn optimal_plain_content() -> Self {
        UtilityConfig { plain: S::one() }
    }

    pub fn plain(&self) -> S {
        self.plain
    }
}

/// `V(X) = Σ_j π_j(X)`.
pub fn social_welfare<S: Scalar>(game: &Game<S>, kind: MediatorKind, profile: &StrategyProfile) -> S {
    payoff_vector(game, kind, profile).welfare
}

/// Expected satisfaction summed over users, with the no-item outcome worth
/// the plain utility.
pub fn user_utility<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    profile: &StrategyProfile,
    config: &UtilityConfig<S>,
) -> S {
    (0..game.num_users())
        .map(|user| {
            let sats = game.profile_sats(profile, user);
            let dist = display_distribution(game, kind, profile, user);
            let shown: S = dist.per_player.iter().zip(&sats).map(|(p, s)| *p * *s).sum();
            shown + dist.none_prob * config.plain
        })
        .sum()
}

/// Best utility any mediator could deliver under `profile`: each user gets
/// the better of its best displayed item and the plain content.
pub fn best_possible_utility<S: Scalar>(game: &Game<S>, profile: &StrategyProfile, config: &UtilityConfig<S>) -> S {
    (0..game.num_users())
        .map(|user| game.max_sat(profile, user).max_of(config.plain))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Welfare,
    UserUtility,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Welfare => "poa",
            Metric::UserUtility => "upoa",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PoARatio<S> {
    Finite(S),
    /// No equilibrium exists, or the worst equilibrium has value zero while
    /// the optimum is positive.
    Unbounded,
}

impl<S: Scalar> PoARatio<S> {
    pub fn finite(&self) -> Option<S> {
        match self {
            PoARatio::Finite(v) => Some(*v),
            PoARatio::Unbounded => None,
        }
    }
}

impl<S: Scalar> fmt::Display for PoARatio<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoARatio::Finite(v) => f.write_str(&format_scalar(v)),
            PoARatio::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PoAResult<S> {
    pub metric: Metric,
    pub optimum: S,
    pub optimum_profile: StrategyProfile,
    /// `None` when no pure equilibrium exists.
    pub worst_eq: Option<S>,
    pub worst_eq_profile: Option<StrategyProfile>,
    pub ratio: PoARatio<S>,
    pub equilibria: usize,
    /// Better-response cycle witnessing the absence of equilibria.
    pub cycle: Option<Vec<StrategyProfile>>,
}

impl<S: Scalar> PoAResult<S> {
    pub fn has_equilibrium(&self) -> bool {
        self.worst_eq.is_some()
    }
}

fn ratio<S: Scalar>(optimum: S, worst: S) -> PoARatio<S> {
    if worst.is_zero() {
        if optimum.is_zero() {
            PoARatio::Finite(S::one())
        } else {
            PoARatio::Unbounded
        }
    } else {
        PoARatio::Finite(optimum / worst)
    }
}

fn anarchy<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    cap: u128,
    metric: Metric,
    optimum_of: impl Fn(&StrategyProfile, &[S]) -> S,
    equilibrium_of: impl Fn(&StrategyProfile, &[S]) -> S,
) -> Result<PoAResult<S>> {
    let mut best: Option<(S, StrategyProfile)> = None;
    let mut worst: Option<(S, StrategyProfile)> = None;
    let mut equilibria = 0;
    scan_profiles(game, kind, cap, |x, payoffs, stable| {
        let v = optimum_of(&x, payoffs);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, x.clone()));
        }
        if stable {
            equilibria += 1;
            let w = equilibrium_of(&x, payoffs);
            if worst.as_ref().is_none_or(|(b, _)| w < *b) {
                worst = Some((w, x));
            }
        }
    })?;
    let (optimum, optimum_profile) = best.expect("profile space is never empty");
    Ok(match worst {
        Some((w, wp)) => PoAResult {
            metric,
            optimum,
            optimum_profile,
            worst_eq: Some(w),
            worst_eq_profile: Some(wp),
            ratio: ratio(optimum, w),
            equilibria,
            cycle: None,
        },
        None => {
            let steps = game.profile_space_size().min(1 << 24) as usize * game.num_players() + 2;
            PoAResult {
                metric,
                optimum,
                optimum_profile,
                worst_eq: None,
                worst_eq_profile: None,
                ratio: PoARatio::Unbounded,
                equilibria: 0,
                cycle: find_deviation_cycle(game, kind, &game.profile_at(0), steps),
            }
        }
    })
}

/// `max_X V(X) / min_{X ∈ E} V(X)` over the full profile space.
pub fn price_of_anarchy<S: Scalar>(game: &Game<S>, kind: MediatorKind, cap: u128) -> Result<PoAResult<S>> {
    let welfare = |_: &StrategyProfile, p: &[S]| p.iter().copied().sum::<S>();
    anarchy(game, kind, cap, Metric::Welfare, welfare, welfare)
}

/// Best achievable user utility over all mediators and profiles, divided by
/// the worst equilibrium user utility under `kind`.
pub fn user_price_of_anarchy<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    config: &UtilityConfig<S>,
    cap: u128,
) -> Result<PoAResult<S>> {
    anarchy(
        game,
        kind,
        cap,
        Metric::UserUtility,
        |x, _| best_possible_utility(game, x, config),
        |x, _| user_utility(game, kind, x, config),
    )
}

pub const POA_CSV_HEADER: [&str; 6] = ["game_id", "mediator", "metric", "optimum", "worst_eq", "ratio"];

/// Writes `(game_id, mediator, result)` rows as CSV.
pub fn write_poa_csv<S: Scalar, W: Write>(rows: &[(String, MediatorKind, PoAResult<S>)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(POA_CSV_HEADER)?;
    for (id, kind, r) in rows {
        w.write_record([
            id.clone(),
            kind.to_string(),
            r.metric.name().to_string(),
            format_scalar(&r.optimum),
            r.worst_eq.map(|v| format_scalar(&v)).unwrap_or_else(|| "none".into()),
            r.ratio.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
