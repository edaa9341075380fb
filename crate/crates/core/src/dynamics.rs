//! Player payoffs, better-/best-response dynamics, pure Nash equilibria and
//! the exact potential of games played under the Shapley mediator.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, SortedLevels, StrategyProfile};
use crate::mediator::{mediate, MediatorKind};
use crate::scalar::Scalar;

/// Payoff tables up to this many entries are materialized in memory; larger
/// spaces are scanned profile by profile.
const TABLE_ENTRY_LIMIT: u128 = 4_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct PayoffVector<S> {
    /// Expected number of displays of each player.
    pub payoffs: Vec<S>,
    /// Social welfare, the sum of all payoffs.
    pub welfare: S,
}

impl<S: Scalar> PayoffVector<S> {
    pub fn from_payoffs(payoffs: Vec<S>) -> Self {
        let welfare = payoffs.iter().copied().sum();
        PayoffVector { payoffs, welfare }
    }
}

/// `π_j(X) = Σ_i P(M(X, u_i) = j)` for every player.
pub fn payoff_vector<S: Scalar>(game: &Game<S>, kind: MediatorKind, profile: &StrategyProfile) -> PayoffVector<S> {
    let mut payoffs = vec![S::zero(); game.num_players()];
    for user in 0..game.num_users() {
        let dist = mediate(kind, &game.profile_sats(profile, user));
        for (p, q) in payoffs.iter_mut().zip(dist.per_player) {
            *p = *p + q;
        }
    }
    PayoffVector::from_payoffs(payoffs)
}

/// Payoff of a single player.
pub fn player_payoff<S: Scalar>(game: &Game<S>, kind: MediatorKind, profile: &StrategyProfile, player: usize) -> S {
    (0..game.num_users())
        .map(|user| mediate(kind, &game.profile_sats(profile, user)).per_player[player])
        .sum()
}

/// How a deviating player picks among improving strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseRule {
    /// First improving strategy in menu order.
    #[default]
    Better,
    /// Strategy with the largest gain (first in menu order among ties).
    Best,
}

impl FromStr for ResponseRule {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "better" => Ok(ResponseRule::Better),
            "best" => Ok(ResponseRule::Best),
            other => Err(format!("unknown response rule {other:?} (expected better or best)")),
        }
    }
}

/// An improving strategy for `player` under the given rule, if any.
pub fn respond<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    profile: &StrategyProfile,
    player: usize,
    rule: ResponseRule,
) -> Option<(usize, S)> {
    let current_strategy = profile.0[player];
    let current = player_payoff(game, kind, profile, player);
    let mut best: Option<(usize, S)> = None;
    for s in 0..game.strategies(player).len() {
        if s == current_strategy {
            continue;
        }
        let gain = player_payoff(game, kind, &profile.with_choice(player, s), player) - current;
        if !S::is_improvement(&gain) {
            continue;
        }
        match rule {
            ResponseRule::Better => return Some((s, gain)),
            ResponseRule::Best => {
                if best.as_ref().is_none_or(|(_, g)| gain > *g) {
                    best = Some((s, gain));
                }
            }
        }
    }
    best
}

/// First strictly improving strategy in menu order, or `None` when the
/// player is already best-responding.
pub fn better_response<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    profile: &StrategyProfile,
    player: usize,
) -> Option<usize> {
    respond(game, kind, profile, player, ResponseRule::Better).map(|(s, _)| s)
}

pub fn best_response<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    profile: &StrategyProfile,
    player: usize,
) -> Option<usize> {
    respond(game, kind, profile, player, ResponseRule::Best).map(|(s, _)| s)
}

/// `true` if no player has an improving unilateral deviation.
pub fn is_pne<S: Scalar>(game: &Game<S>, kind: MediatorKind, profile: &StrategyProfile) -> bool {
    (0..game.num_players()).all(|j| better_response(game, kind, profile, j).is_none())
}

/// Exact potential of the Shapley-mediator game in harmonic form:
/// `Φ(X) = Σ_i Σ_{m=1}^{N} (σ_i^m − σ_i^{m−1}) · H_{N−m+1}`.
pub fn potential_value<S: Scalar>(game: &Game<S>, profile: &StrategyProfile) -> S {
    let n = game.num_players();
    let harmonic = harmonic_numbers::<S>(n);
    (0..game.num_users())
        .map(|user| {
            let lv = SortedLevels::from_values(&game.profile_sats(profile, user));
            (1..=n)
                .map(|m| (lv.levels[m] - lv.levels[m - 1]) * harmonic[n - m + 1])
                .sum::<S>()
        })
        .sum()
}

/// `H_0 … H_n`.
pub fn harmonic_numbers<S: Scalar>(n: usize) -> Vec<S> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(S::zero());
    for k in 1..=n {
        h.push(h[k - 1] + S::one() / S::from_int(k as i64));
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Players take turns in index order.
    #[default]
    RoundRobin,
    /// The next deviator is drawn uniformly from the players not yet known to
    /// be best-responding.
    Random,
}

impl FromStr for Schedule {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "round-robin" => Ok(Schedule::RoundRobin),
            "random" => Ok(Schedule::Random),
            other => Err(format!("unknown schedule {other:?} (expected round-robin or random)")),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::RoundRobin => "round-robin",
            Schedule::Random => "random",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DynamicsConfig {
    pub schedule: Schedule,
    pub rule: ResponseRule,
    pub seed: u64,
    /// Upper bound on the number of improving moves.
    pub max_steps: usize,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            schedule: Schedule::RoundRobin,
            rule: ResponseRule::Better,
            seed: 0,
            max_steps: 10_000,
        }
    }
}

/// One improving move.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsStep<S> {
    pub player: usize,
    pub from: usize,
    pub to: usize,
    pub payoff_delta: S,
    /// Change of the Shapley potential; only recorded under the Shapley mediator.
    pub potential_delta: Option<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsTrace<S> {
    pub initial: StrategyProfile,
    pub steps: Vec<DynamicsStep<S>>,
    pub terminal: StrategyProfile,
    pub converged: bool,
}

impl<S: Scalar> DynamicsTrace<S> {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// CSV with columns `step,player,from,to,payoff_delta,potential_delta`.
    pub fn write_csv<W: std::io::Write>(&self, game: &Game<S>, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "player", "from", "to", "payoff_delta", "potential_delta"])?;
        for (k, step) in self.steps.iter().enumerate() {
            w.write_record([
                (k + 1).to_string(),
                game.players()[step.player].name.clone(),
                game.strategy_label(step.player, step.from),
                game.strategy_label(step.player, step.to),
                crate::scalar::format_scalar(&step.payoff_delta),
                step.potential_delta
                    .map(|d| crate::scalar::format_scalar(&d))
                    .unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs better-/best-response dynamics from `initial` until no player can
/// improve or `max_steps` improving moves were made. Deterministic given
/// the seed.
pub fn run_dynamics<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    initial: &StrategyProfile,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace<S>> {
    game.validate_profile(initial)?;
    if config.max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
    }
    let n = game.num_players();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut profile = initial.clone();
    let mut steps = Vec::new();
    // settled[j]: player j was found best-responding to the current profile.
    let mut settled = vec![false; n];
    let mut turn = 0usize;
    let converged = loop {
        if settled.iter().all(|&s| s) {
            break true;
        }
        if steps.len() >= config.max_steps {
            break false;
        }
        let player = match config.schedule {
            Schedule::RoundRobin => {
                let j = turn % n;
                turn += 1;
                j
            }
            Schedule::Random => {
                let open: Vec<usize> = (0..n).filter(|&j| !settled[j]).collect();
                open[rng.random_range(0..open.len())]
            }
        };
        match respond(game, kind, &profile, player, config.rule) {
            None => settled[player] = true,
            Some((to, gain)) => {
                let next = profile.with_choice(player, to);
                let potential_delta = (kind == MediatorKind::Shapley)
                    .then(|| potential_value(game, &next) - potential_value(game, &profile));
                steps.push(DynamicsStep {
                    player,
                    from: profile.0[player],
                    to,
                    payoff_delta: gain,
                    potential_delta,
                });
                profile = next;
                settled.iter_mut().for_each(|s| *s = false);
            }
        }
    };
    Ok(DynamicsTrace {
        initial: initial.clone(),
        steps,
        terminal: profile,
        converged,
    })
}

/// Follows round-robin better responses from `start` until a profile
/// repeats, returning the repeating cycle. `None` if the walk reaches a PNE
/// or exceeds `max_steps` first.
pub fn find_deviation_cycle<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    start: &StrategyProfile,
    max_steps: usize,
) -> Option<Vec<StrategyProfile>> {
    let n = game.num_players();
    let mut seen: HashMap<StrategyProfile, usize> = HashMap::new();
    let mut path = vec![start.clone()];
    seen.insert(start.clone(), 0);
    let mut profile = start.clone();
    let mut idle = 0;
    let mut turn = 0;
    while path.len() <= max_steps {
        let j = turn % n;
        turn += 1;
        match better_response(game, kind, &profile, j) {
            None => {
                idle += 1;
                if idle >= n {
                    return None;
                }
            }
            Some(s) => {
                idle = 0;
                profile = profile.with_choice(j, s);
                if let Some(&first) = seen.get(&profile) {
                    return Some(path[first..].to_vec());
                }
                seen.insert(profile.clone(), path.len());
                path.push(profile.clone());
            }
        }
    }
    None
}

/// Payoff vectors of every profile in enumeration order.
#[derive(Clone, Debug)]
pub struct PayoffTable<S> {
    players: usize,
    radices: Vec<usize>,
    strides: Vec<usize>,
    payoffs: Vec<S>,
}

impl<S: Scalar> PayoffTable<S> {
    pub fn build(game: &Game<S>, kind: MediatorKind, cap: u128) -> Result<Self> {
        let profiles = game.enumerate_profiles(cap)?;
        let n = game.num_players();
        let radices: Vec<usize> = (0..n).map(|j| game.strategies(j).len()).collect();
        let mut strides = vec![1usize; n];
        for j in (0..n.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * radices[j + 1];
        }
        let mut payoffs = Vec::with_capacity(game.profile_space_size() as usize * n);
        for x in profiles {
            payoffs.extend(payoff_vector(game, kind, &x).payoffs);
        }
        Ok(PayoffTable {
            players: n,
            radices,
            strides,
            payoffs,
        })
    }

    pub fn len(&self) -> usize {
        self.payoffs.len() / self.players
    }

    pub fn is_empty(&self) -> bool {
        self.payoffs.is_empty()
    }

    pub fn payoffs(&self, index: usize) -> &[S] {
        &self.payoffs[index * self.players..(index + 1) * self.players]
    }

    pub fn welfare(&self, index: usize) -> S {
        self.payoffs(index).iter().copied().sum()
    }

    /// Whether the profile at `index` admits no improving deviation.
    pub fn is_pne(&self, index: usize) -> bool {
        let here = self.payoffs(index);
        (0..self.players).all(|j| {
            let current = (index / self.strides[j]) % self.radices[j];
            let base = index - current * self.strides[j];
            (0..self.radices[j])
                .all(|s| s == current || !S::is_improvement(&(self.payoffs(base + s * self.strides[j])[j] - here[j])))
        })
    }
}

fn fits_in_table<S: Scalar>(game: &Game<S>) -> bool {
    game.profile_space_size().saturating_mul(game.num_players() as u128) <= TABLE_ENTRY_LIMIT
}

/// All pure Nash equilibria, in enumeration order.
pub fn enumerate_pne<S: Scalar>(game: &Game<S>, kind: MediatorKind, cap: u128) -> Result<Vec<StrategyProfile>> {
    if fits_in_table(game) {
        let table = PayoffTable::build(game, kind, cap)?;
        Ok((0..table.len())
            .filter(|&k| table.is_pne(k))
            .map(|k| game.profile_at(k))
            .collect())
    } else {
        Ok(game
            .enumerate_profiles(cap)?
            .filter(|x| is_pne(game, kind, x))
            .collect())
    }
}

/// Visits `(profile, welfare, is_pne)` for every profile.
pub(crate) fn scan_profiles<S: Scalar>(
    game: &Game<S>,
    kind: MediatorKind,
    cap: u128,
    mut visit: impl FnMut(StrategyProfile, &[S], bool),
) -> Result<()> {
    if fits_in_table(game) {
        let table = PayoffTable::build(game, kind, cap)?;
        for k in 0..table.len() {
            visit(game.profile_at(k), table.payoffs(k), table.is_pne(k));
        }
    } else {
        for x in game.enumerate_profiles(cap)? {
            let pv = payoff_vector(game, kind, &x);
            let stable = is_pne(game, kind, &x);
            visit(x, &pv.payoffs, stable);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_example1, gen_impossibility};
    use crate::scalar::Rational;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    const CAP: u128 = crate::game::DEFAULT_ENUMERATION_CAP;

    #[test]
    fn example_two_payoffs() {
        let g = gen_example1();
        let x23 = g.parse_profile("l2,l3").unwrap();
        let x13 = g.parse_profile("l1,l3").unwrap();
        assert_eq!(payoff_vector(&g, MediatorKind::Shapley, &x23).payoffs[0], r(8, 5));
        assert_eq!(payoff_vector(&g, MediatorKind::Shapley, &x13).payoffs[0], r(7, 10));
        assert_eq!(payoff_vector(&g, MediatorKind::Top, &x13).payoffs[0], r(2, 1));
        assert_eq!(payoff_vector(&g, MediatorKind::Top, &x23).payoffs[0], r(1, 1));
    }

    #[test]
    fn example_two_better_response() {
        let g = gen_example1();
        let x13 = g.parse_profile("l1,l3").unwrap();
        let s = better_response(&g, MediatorKind::Shapley, &x13, 0).unwrap();
        assert_eq!(g.strategy_label(0, s), "l2");
        let x23 = g.parse_profile("l2,l3").unwrap();
        assert!(is_pne(&g, MediatorKind::Shapley, &x23));
        assert_eq!(enumerate_pne(&g, MediatorKind::Shapley, CAP).unwrap(), vec![x23]);
    }

    #[test]
    fn potential_difference_matches_payoff_difference() {
        let g = gen_example1();
        let x23 = g.parse_profile("l2,l3").unwrap();
        let x13 = g.parse_profile("l1,l3").unwrap();
        assert_eq!(potential_value(&g, &x23) - potential_value(&g, &x13), r(9, 10));
    }

    #[test]
    fn harmonic_potential_one_user() {
        use crate::game::{ItemSpec, Mode, PlayerSpec};
        let g = Game::new(
            Mode::Single,
            vec!["u".into()],
            vec![
                ItemSpec::new("a", vec![r(3, 10)]),
                ItemSpec::new("b", vec![r(1, 2)]),
                ItemSpec::new("c", vec![r(7, 10)]),
            ],
            vec![
                PlayerSpec::new("1", ["a"]),
                PlayerSpec::new("2", ["b"]),
                PlayerSpec::new("3", ["c"]),
            ],
        )
        .unwrap();
        assert_eq!(potential_value(&g, &StrategyProfile(vec![0, 0, 0])), r(21, 20));
    }

    #[test]
    fn top_cycles_on_impossibility_instance() {
        let g = gen_impossibility(r(9, 10), r(1, 2)).unwrap();
        let start = g.parse_profile("l2,l3").unwrap();
        assert!((0..2).any(|j| better_response(&g, MediatorKind::Top, &start, j).is_some()));
        let cfg = DynamicsConfig {
            max_steps: 10_000,
            ..DynamicsConfig::default()
        };
        let trace = run_dynamics(&g, MediatorKind::Top, &start, &cfg).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.step_count(), 10_000);
        let cycle = find_deviation_cycle(&g, MediatorKind::Top, &start, 100).unwrap();
        assert!(cycle.len() >= 2);
    }

    #[test]
    fn starting_at_equilibrium_takes_no_steps() {
        let g = gen_example1();
        let x23 = g.parse_profile("l2,l3").unwrap();
        for schedule in [Schedule::RoundRobin, Schedule::Random] {
            let cfg = DynamicsConfig {
                schedule,
                ..DynamicsConfig::default()
            };
            let trace = run_dynamics(&g, MediatorKind::Shapley, &x23, &cfg).unwrap();
            assert!(trace.converged);
            assert_eq!(trace.step_count(), 0);
        }
    }

    #[test]
    fn none_mediator_every_profile_is_stable() {
        let g = gen_impossibility(r(9, 10), r(1, 2)).unwrap();
        assert_eq!(enumerate_pne(&g, MediatorKind::None, CAP).unwrap().len(), 9);
    }

    #[test]
    fn trace_csv_layout() {
        let g = gen_example1();
        let x13 = g.parse_profile("l1,l3").unwrap();
        let trace = run_dynamics(&g, MediatorKind::Shapley, &x13, &DynamicsConfig::default()).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "step,player,from,to,payoff_delta,potential_delta"
        );
        assert_eq!(
            lines.next().unwrap(),
            "1,p1,l1,l2,9/10 (0.900000000000),9/10 (0.900000000000)"
        );
        assert!(lines.next().is_none());
    }

    #[test]
    fn rejects_zero_steps() {
        let g = gen_example1();
        let x = g.parse_profile("l1,l3").unwrap();
        let cfg = DynamicsConfig {
            max_steps: 0,
            ..DynamicsConfig::default()
        };
        assert!(run_dynamics(&g, MediatorKind::Shapley, &x, &cfg).is_err());
    }
}
