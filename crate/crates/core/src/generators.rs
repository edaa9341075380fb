//! Game instances: the worked example, the extremal constructions used for
//! the impossibility, PoA and UPoA results, and a random-game generator for
//! property suites.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{Game, ItemSpec, Mode, PlayerSpec, StrategyProfile};
use crate::scalar::{Rational, Scalar};

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn positive_unit<S: Scalar>(name: &str, v: S) -> Result<()> {
    if v > S::zero() && v <= S::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in (0,1], got {v}")))
    }
}

/// Two players, three users, menus `{l1,l2}` and `{l3}`.
pub fn gen_example1() -> Game<Rational> {
    let t = |k: i128| Rational::new(k, 10);
    Game::new(
        Mode::Single,
        names("u", 3),
        vec![
            ItemSpec::new("l1", vec![t(1), t(9), t(2)]),
            ItemSpec::new("l2", vec![t(8), t(7), t(9)]),
            ItemSpec::new("l3", vec![t(9), t(8), t(1)]),
        ],
        vec![PlayerSpec::new("p1", ["l1", "l2"]), PlayerSpec::new("p2", ["l3"])],
    )
    .expect("example game is valid")
}

/// Symmetric two-player game over three users with the cyclic satisfaction
/// pattern `l1 = (0,y,x)`, `l2 = (x,0,y)`, `l3 = (y,x,0)`; both players may
/// offer any of the three items.
pub fn gen_impossibility<S: Scalar>(x: S, y: S) -> Result<Game<S>> {
    positive_unit("x", x)?;
    positive_unit("y", y)?;
    let z = S::zero();
    let all = ["l1", "l2", "l3"];
    Game::new(
        Mode::Single,
        names("u", 3),
        vec![
            ItemSpec::new("l1", vec![z, y, x]),
            ItemSpec::new("l2", vec![x, z, y]),
            ItemSpec::new("l3", vec![y, x, z]),
        ],
        vec![PlayerSpec::new("p1", all), PlayerSpec::new("p2", all)],
    )
}

/// Star instance attaining the PoA bound: `N` players and `N` users, items
/// `l1..lN` with `σ_i(l_i) = 1`, and a shared item `l*` with
/// `σ_i(l*) = N/(2N−1)` for every user.
pub fn gen_tight_poa<S: Scalar>(players: usize) -> Result<Game<S>> {
    if players < 2 {
        return Err(Error::InvalidArgument(format!(
            "tight PoA instance needs N ≥ 2, got {players}"
        )));
    }
    let a = S::from_ratio(players as i64, 2 * players as i64 - 1);
    let mut items: Vec<ItemSpec<S>> = (0..players)
        .map(|k| {
            let sat = (0..players)
                .map(|i| if i == k { S::one() } else { S::zero() })
                .collect();
            ItemSpec::new(format!("l{}", k + 1), sat)
        })
        .collect();
    items.push(ItemSpec::new("l*", vec![a; players]));
    let menu: Vec<String> = items.iter().map(|i| i.name.clone()).collect();
    let specs = names("p", players)
        .into_iter()
        .map(|n| PlayerSpec::new(n, menu.clone()))
        .collect();
    Game::new(Mode::Single, names("u", players), items, specs)
}

/// One user, one player, one item of satisfaction `ε`.
pub fn gen_prop6<S: Scalar>(eps: S) -> Result<Game<S>> {
    positive_unit("eps", eps)?;
    Game::new(
        Mode::Single,
        names("u", 1),
        vec![ItemSpec::new("l", vec![eps])],
        vec![PlayerSpec::new("p1", ["l"])],
    )
}

/// Two users; `l1 = (1,0)`, `l2 = (δ,δ)`, `l3 = (ε,ε)` with `0 < ε < δ`;
/// menus `{l1,l2}` and `{l3}`.
pub fn gen_prop7<S: Scalar>(delta: S, eps: S) -> Result<Game<S>> {
    positive_unit("delta", delta)?;
    positive_unit("eps", eps)?;
    if eps >= delta {
        return Err(Error::InvalidArgument(format!(
            "need eps < delta, got eps={eps}, delta={delta}"
        )));
    }
    Game::new(
        Mode::Single,
        names("u", 2),
        vec![
            ItemSpec::new("l1", vec![S::one(), S::zero()]),
            ItemSpec::new("l2", vec![delta, delta]),
            ItemSpec::new("l3", vec![eps, eps]),
        ],
        vec![PlayerSpec::new("p1", ["l1", "l2"]), PlayerSpec::new("p2", ["l3"])],
    )
}

/// Shape of random games used by the property suites.
#[derive(Clone, Debug)]
pub struct RandomGameConfig {
    pub players: RangeInclusive<usize>,
    pub menu_size: RangeInclusive<usize>,
    pub users: RangeInclusive<usize>,
    /// Satisfaction values are multiples of `1/grid`.
    pub grid: i64,
    pub mode: Mode,
    /// Chance that a menu slot reuses an item already on another menu.
    pub shared_item_prob: f64,
    /// Chance that a satisfaction entry is drawn from {0, 1, a value already
    /// used by this user} instead of the grid, so ties and null players occur.
    pub special_value_prob: f64,
}

impl Default for RandomGameConfig {
    fn default() -> Self {
        RandomGameConfig {
            players: 1..=4,
            menu_size: 1..=4,
            users: 1..=5,
            grid: 100,
            mode: Mode::Single,
            shared_item_prob: 0.2,
            special_value_prob: 0.2,
        }
    }
}

impl RandomGameConfig {
    pub fn personalized() -> Self {
        RandomGameConfig {
            mode: Mode::Personalized,
            ..Self::default()
        }
    }

    pub fn with_players(mut self, players: RangeInclusive<usize>) -> Self {
        self.players = players;
        self
    }
}

/// Random exact game on the rational grid of `config`.
pub fn random_game<R: Rng + ?Sized>(rng: &mut R, config: &RandomGameConfig) -> Game<Rational> {
    let players = rng.random_range(config.players.clone());
    let users = rng.random_range(config.users.clone());

    let mut item_names: Vec<String> = Vec::new();
    let mut menus: Vec<Vec<String>> = Vec::with_capacity(players);
    for _ in 0..players {
        let size = rng.random_range(config.menu_size.clone());
        let mut menu: Vec<String> = Vec::with_capacity(size);
        while menu.len() < size {
            let reuse = !item_names.is_empty() && rng.random_bool(config.shared_item_prob);
            let name = if reuse {
                item_names[rng.random_range(0..item_names.len())].clone()
            } else {
                let fresh = format!("l{}", item_names.len() + 1);
                item_names.push(fresh.clone());
                fresh
            };
            if !menu.contains(&name) {
                menu.push(name);
            }
        }
        menus.push(menu);
    }

    let mut columns: Vec<Vec<Rational>> = vec![Vec::new(); users];
    let mut items = Vec::with_capacity(item_names.len());
    for name in &item_names {
        let mut sat = Vec::with_capacity(users);
        for col in columns.iter_mut() {
            let v = if rng.random_bool(config.special_value_prob) {
                match rng.random_range(0..3) {
                    0 => Rational::zero(),
                    1 => Rational::one(),
                    _ if !col.is_empty() => col[rng.random_range(0..col.len())],
                    _ => Rational::zero(),
                }
            } else {
                Rational::from_ratio(rng.random_range(0..=config.grid), config.grid)
            };
            col.push(v);
            sat.push(v);
        }
        items.push(ItemSpec::new(name.clone(), sat));
    }

    let specs = menus
        .into_iter()
        .enumerate()
        .map(|(j, menu)| {
            let budget = match config.mode {
                Mode::Single => 1,
                Mode::Personalized => rng.random_range(1..=menu.len()),
            };
            PlayerSpec::new(format!("p{}", j + 1), menu).with_budget(budget)
        })
        .collect();
    Game::new(config.mode, names("u", users), items, specs).expect("random games are valid by construction")
}

/// Uniformly random strategy profile of `game`.
pub fn random_profile<S: Scalar, R: Rng + ?Sized>(game: &Game<S>, rng: &mut R) -> StrategyProfile {
    StrategyProfile(
        (0..game.num_players())
            .map(|j| rng.random_range(0..game.strategies(j).len()))
            .collect(),
    )
}
