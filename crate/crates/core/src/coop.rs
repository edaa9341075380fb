//! Brute-force cooperative-game machinery: the induced characteristic
//! function, the permutation-sum Shapley value, and the permutation counts
//! behind the linear-time closed form.
//!
//! Everything here enumerates permutations explicitly. It exists to validate
//! the closed form in [`crate::mediator::shapley_distribution`], so it shares
//! no code with it.

use crate::error::{Error, Result};
use crate::game::{Game, StrategyProfile};
use crate::scalar::Scalar;

/// Largest player count the permutation enumeration accepts (10! ≈ 3.6M).
pub const BRUTE_FORCE_CAP: usize = 10;

/// `v_i(C; X)`: the best satisfaction user i gets from the items chosen by
/// the members of coalition C.
#[derive(Clone, Debug)]
pub struct CoalitionValueFn<S> {
    sats: Vec<S>,
}

impl<S: Scalar> CoalitionValueFn<S> {
    pub fn new(game: &Game<S>, profile: &StrategyProfile, user: usize) -> Self {
        CoalitionValueFn {
            sats: game.profile_sats(profile, user),
        }
    }

    pub fn from_sats(sats: Vec<S>) -> Self {
        CoalitionValueFn { sats }
    }

    pub fn num_players(&self) -> usize {
        self.sats.len()
    }

    /// Zero for the empty coalition.
    pub fn value(&self, coalition: &[usize]) -> S {
        coalition.iter().fold(S::zero(), |acc, &j| acc.max_of(self.sats[j]))
    }

    /// Same as [`value`](Self::value) with the coalition as a bit mask.
    pub fn value_of_mask(&self, mask: u64) -> S {
        (0..self.sats.len())
            .filter(|j| mask & (1 << j) != 0)
            .fold(S::zero(), |acc, j| acc.max_of(self.sats[j]))
    }
}

pub fn coalition_value<S: Scalar>(
    game: &Game<S>,
    profile: &StrategyProfile,
    user: usize,
    coalition: &[usize],
) -> Result<S> {
    if let Some(&j) = coalition.iter().find(|&&j| j >= game.num_players()) {
        return Err(Error::InvalidArgument(format!("player {j} is not in the game")));
    }
    Ok(CoalitionValueFn::new(game, profile, user).value(coalition))
}

/// Rearranges `perm` into the next permutation in lexicographic order;
/// returns `false` after the last one.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut k = perm.len() - 1;
    while perm[k] <= perm[i - 1] {
        k -= 1;
    }
    perm.swap(i - 1, k);
    perm[i..].reverse();
    true
}

/// Shapley value of every player, `φ_j = (1/N!) Σ_R [v(P_j^R ∪ {j}) − v(P_j^R)]`,
/// by walking all N! orders.
pub fn shapley_bruteforce_values<S: Scalar>(v: &CoalitionValueFn<S>) -> Result<Vec<S>> {
    let n = v.num_players();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::BruteForceCap {
            players: n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let mut totals = vec![S::zero(); n];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut orders: i64 = 0;
    loop {
        orders += 1;
        let mut coalition: u64 = 0;
        let mut current = S::zero();
        for &j in &perm {
            let joined = coalition | (1 << j);
            let next = v.value_of_mask(joined);
            totals[j] = totals[j] + (next - current);
            coalition = joined;
            current = next;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let orders = S::from_int(orders);
    Ok(totals.into_iter().map(|t| t / orders).collect())
}

pub fn shapley_bruteforce<S: Scalar>(game: &Game<S>, profile: &StrategyProfile, user: usize) -> Result<Vec<S>> {
    shapley_bruteforce_values(&CoalitionValueFn::new(game, profile, user))
}

/// Permutation counts for player `j` (1-based) among `N` players ordered by
/// satisfaction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationCounts {
    pub players: usize,
    pub player: usize,
    /// Orders in which every predecessor of `j` has a smaller index.
    pub b: u64,
    /// `a[r-1]`: orders in which the largest predecessor index is `r`, for `r < j`.
    pub a: Vec<u64>,
}

impl PermutationCounts {
    /// `b_r = N!/(N − r + 1)`.
    pub fn closed_form_b(players: usize, r: usize) -> u64 {
        factorial(players) / (players - r + 1) as u64
    }

    /// Checks `b_j = N!/(N−j+1)` and `a_r = b_{r+1} − b_r` for every `r < j`.
    pub fn matches_closed_form(&self) -> bool {
        let n = self.players;
        self.b == Self::closed_form_b(n, self.player)
            && self
                .a
                .iter()
                .enumerate()
                .all(|(k, &a)| a == Self::closed_form_b(n, k + 2) - Self::closed_form_b(n, k + 1))
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Counts, by enumerating all N! orders, how often player `j` is preceded
/// only by smaller indices (`b_j`) and how often its largest predecessor is
/// `r` (`a_r`).
pub fn permutation_counts(players: usize, player: usize) -> Result<PermutationCounts> {
    if players > BRUTE_FORCE_CAP {
        return Err(Error::BruteForceCap {
            players,
            cap: BRUTE_FORCE_CAP,
        });
    }
    if player < 1 || player > players {
        return Err(Error::InvalidArgument(format!(
            "player index {player} not in 1..={players}"
        )));
    }
    let mut perm: Vec<usize> = (1..=players).collect();
    let mut b = 0u64;
    let mut a = vec![0u64; player - 1];
    loop {
        let prefix_max = perm.iter().take_while(|&&x| x != player).copied().max().unwrap_or(0);
        if prefix_max < player {
            b += 1;
            if prefix_max >= 1 {
                a[prefix_max - 1] += 1;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(PermutationCounts { players, player, b, a })
}
