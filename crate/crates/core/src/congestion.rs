//! Congestion-game form of a recommendation game under the Shapley mediator.
//!
//! Every user's satisfaction axis is cut at the distinct satisfaction values
//! (plus 0 and 1). Each (user, interval) pair is a resource; offering an item
//! claims all intervals below the user's satisfaction with it, and a
//! resource's length is split evenly among the players claiming it. Player
//! payoffs and the Rosenthal potential of this game coincide with the
//! Shapley-mediator payoffs and potential.

use crate::dynamics::PayoffVector;
use crate::game::{Game, StrategyProfile};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct CongestionGame<S> {
    /// `ε_0 = 0 < ε_1 < … < ε_B = 1`
    breakpoints: Vec<S>,
    users: usize,
    players: usize,
    /// Resources claimed by each strategy of each player, sorted.
    strategy_resources: Vec<Vec<Vec<usize>>>,
    /// Resources claimed by each single item, sorted.
    item_resources: Vec<Vec<usize>>,
}

impl<S: Scalar> CongestionGame<S> {
    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    /// Number of intervals per user, `B = |E| − 1`.
    pub fn intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn num_resources(&self) -> usize {
        self.users * self.intervals()
    }

    /// Resource id of interval `m` (1-based) for `user`.
    pub fn resource(&self, user: usize, interval: usize) -> usize {
        user * self.intervals() + (interval - 1)
    }

    /// `(user, interval)` of a resource id.
    pub fn locate(&self, resource: usize) -> (usize, usize) {
        (resource / self.intervals(), resource % self.intervals() + 1)
    }

    /// `A(l)`: the resources claimed by offering item `l`.
    pub fn item_resources(&self, item: usize) -> &[usize] {
        &self.item_resources[item]
    }

    pub fn strategy_resources(&self, player: usize, strategy: usize) -> &[usize] {
        &self.strategy_resources[player][strategy]
    }

    /// `w_r(k) = (ε_m − ε_{m−1}) / k`, and zero for an unused resource.
    pub fn weight(&self, resource: usize, load: usize) -> S {
        if load == 0 {
            return S::zero();
        }
        let (_, m) = self.locate(resource);
        (self.breakpoints[m] - self.breakpoints[m - 1]) / S::from_int(load as i64)
    }

    /// Number of players claiming each resource.
    pub fn loads(&self, profile: &StrategyProfile) -> Vec<usize> {
        let mut loads = vec![0usize; self.num_resources()];
        for (j, &s) in profile.0.iter().enumerate() {
            for &r in &self.strategy_resources[j][s] {
                loads[r] += 1;
            }
        }
        loads
    }

    /// Rosenthal potential `Σ_r Σ_{k=1}^{load_r} w_r(k)`.
    pub fn potential(&self, profile: &StrategyProfile) -> S {
        self.loads(profile)
            .iter()
            .enumerate()
            .map(|(r, &load)| (1..=load).map(|k| self.weight(r, k)).sum::<S>())
            .sum()
    }
}

pub fn build_congestion_game<S: Scalar>(game: &Game<S>) -> CongestionGame<S> {
    let users = game.num_users();
    let mut breakpoints = vec![S::zero(), S::one()];
    for item in 0..game.items().len() {
        for user in 0..users {
            breakpoints.push(game.sat(item, user));
        }
    }
    breakpoints.sort_by(|a, b| a.total_cmp(b));
    breakpoints.dedup();

    let intervals = breakpoints.len() - 1;
    // Resources of a satisfaction profile over users: all (i, m) with σ_i ≥ ε_m.
    let claim = |sats: &dyn Fn(usize) -> S| -> Vec<usize> {
        let mut out = Vec::new();
        for user in 0..users {
            let s = sats(user);
            let covered = breakpoints[1..].partition_point(|e| *e <= s);
            out.extend((1..=covered).map(|m| user * intervals + (m - 1)));
        }
        out
    };
    let item_resources = (0..game.items().len())
        .map(|item| claim(&|u| game.sat(item, u)))
        .collect();
    let strategy_resources = (0..game.num_players())
        .map(|j| {
            (0..game.strategies(j).len())
                .map(|s| claim(&|u| game.strategy_sat(j, s, u)))
                .collect()
        })
        .collect();
    CongestionGame {
        breakpoints,
        users,
        players: game.num_players(),
        strategy_resources,
        item_resources,
    }
}

/// Payoffs in the congestion game: each player collects the weights of the
/// resources she claims at their current loads.
pub fn congestion_payoffs<S: Scalar>(cg: &CongestionGame<S>, profile: &StrategyProfile) -> PayoffVector<S> {
    assert_eq!(
        profile.0.len(),
        cg.players,
        "profile does not belong to this congestion game"
    );
    let loads = cg.loads(profile);
    let payoffs = profile
        .0
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            cg.strategy_resources[j][s]
                .iter()
                .map(|&r| cg.weight(r, loads[r]))
                .sum()
        })
        .collect();
    PayoffVector::from_payoffs(payoffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::payoff_vector;
    use crate::generators::gen_example1;
    use crate::mediator::MediatorKind;
    use crate::scalar::Rational;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn example_one_breakpoints() {
        let g = gen_example1();
        let cg = build_congestion_game(&g);
        let expected: Vec<Rational> = [0, 1, 2, 7, 8, 9, 10].iter().map(|&k| r(k, 10)).collect();
        assert_eq!(cg.breakpoints(), expected.as_slice());
        assert_eq!(cg.intervals(), 6);
        assert_eq!(cg.num_resources(), 18);
    }

    #[test]
    fn item_claims_intervals_below_its_satisfaction() {
        let g = gen_example1();
        let cg = build_congestion_game(&g);
        let l2 = g.item_index("l2").unwrap();
        let claimed: Vec<(usize, usize)> = cg.item_resources(l2).iter().map(|&r| cg.locate(r)).collect();
        let mut expected = Vec::new();
        for (user, top) in [(0, 4), (1, 3), (2, 5)] {
            for m in 1..=top {
                expected.push((user, m));
            }
        }
        assert_eq!(claimed, expected);
        assert_eq!(cg.breakpoints()[4], r(8, 10));
    }

    #[test]
    fn binary_satisfaction_has_one_interval() {
        use crate::game::{ItemSpec, Mode, PlayerSpec};
        let g = Game::new(
            Mode::Single,
            vec!["u1".into(), "u2".into()],
            vec![
                ItemSpec::new("a", vec![r(1, 1), r(0, 1)]),
                ItemSpec::new("b", vec![r(0, 1), r(1, 1)]),
            ],
            vec![PlayerSpec::new("p", ["a", "b"])],
        )
        .unwrap();
        let cg = build_congestion_game(&g);
        assert_eq!(cg.breakpoints().len(), 2);
        assert_eq!(cg.num_resources(), 2);
    }

    #[test]
    fn weights_shrink_with_load() {
        let cg = build_congestion_game(&gen_example1());
        assert_eq!(cg.weight(0, 0), Rational::zero());
        assert!(cg.weight(0, 1) > cg.weight(0, 2));
    }

    #[test]
    fn payoffs_agree_with_shapley_on_example() {
        let g = gen_example1();
        let cg = build_congestion_game(&g);
        for x in g.enumerate_profiles(10).unwrap() {
            assert_eq!(
                congestion_payoffs(&cg, &x),
                payoff_vector(&g, MediatorKind::Shapley, &x)
            );
        }
    }
}
