//! Recommendation-game data model: users, players with item menus (and
//! budgets in personalized mode), the satisfaction matrix, strategies and
//! strategy profiles.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Default upper bound on the number of profiles an exhaustive analysis walks.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every player offers one item from her menu.
    #[default]
    Single,
    /// Every player offers a set of up to `budget` items; each user is shown
    /// the player's best item for him.
    Personalized,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Player {
    pub name: String,
    /// Indices into [`Game::items`].
    pub menu: Vec<usize>,
    pub budget: usize,
}

/// An item set offered by a player (a single item in single mode). Item
/// indices are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy(Vec<usize>);

impl Strategy {
    pub fn new(mut items: Vec<usize>) -> Self {
        items.sort_unstable();
        items.dedup();
        Strategy(items)
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One strategy per player, stored as indices into each player's strategy
/// space ([`Game::strategies`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile(pub Vec<usize>);

impl StrategyProfile {
    pub fn with_choice(&self, player: usize, strategy: usize) -> StrategyProfile {
        let mut next = self.0.clone();
        next[player] = strategy;
        StrategyProfile(next)
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }
}

/// Input description of an item: its name and the satisfaction of every user.
#[derive(Clone, Debug)]
pub struct ItemSpec<S> {
    pub name: String,
    pub satisfaction: Vec<S>,
}

impl<S> ItemSpec<S> {
    pub fn new(name: impl Into<String>, satisfaction: Vec<S>) -> Self {
        ItemSpec {
            name: name.into(),
            satisfaction,
        }
    }
}

/// Input description of a player.
#[derive(Clone, Debug)]
pub struct PlayerSpec {
    pub name: String,
    pub menu: Vec<String>,
    pub budget: Option<usize>,
}

impl PlayerSpec {
    pub fn new<I, T>(name: impl Into<String>, menu: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        PlayerSpec {
            name: name.into(),
            menu: menu.into_iter().map(Into::into).collect(),
            budget: None,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }
}

/// A validated recommendation game. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Game<S> {
    mode: Mode,
    users: Vec<String>,
    items: Vec<String>,
    /// `sat[item][user]`
    sat: Vec<Vec<S>>,
    players: Vec<Player>,
    /// Enumerable strategy space of each player.
    strategies: Vec<Vec<Strategy>>,
    /// `strategy_sat[player][strategy][user]`
    strategy_sat: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> Game<S> {
    pub fn new(mode: Mode, users: Vec<String>, items: Vec<ItemSpec<S>>, players: Vec<PlayerSpec>) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::schema("users", "at least one user is required"));
        }
        for (i, u) in users.iter().enumerate() {
            if users[..i].contains(u) {
                return Err(Error::schema(format!("users[{i}]"), format!("duplicate user {u:?}")));
            }
        }
        if players.is_empty() {
            return Err(Error::schema("players", "at least one player is required"));
        }

        let mut item_names = Vec::with_capacity(items.len());
        let mut sat = Vec::with_capacity(items.len());
        for item in items {
            let path = format!("items.{}", item.name);
            if item_names.contains(&item.name) {
                return Err(Error::schema(path, "duplicate item"));
            }
            if item.satisfaction.len() != users.len() {
                return Err(Error::schema(
                    path,
                    format!(
                        "expected {} satisfaction entries, found {}",
                        users.len(),
                        item.satisfaction.len()
                    ),
                ));
            }
            for (u, v) in item.satisfaction.iter().enumerate() {
                if !in_unit_interval(v) {
                    return Err(Error::SatisfactionOutOfRange {
                        path: format!("{path}.{}", users[u]),
                        value: v.to_string(),
                    });
                }
            }
            item_names.push(item.name);
            sat.push(item.satisfaction);
        }

        let mut validated = Vec::with_capacity(players.len());
        for (j, p) in players.into_iter().enumerate() {
            let path = format!("players[{j}]");
            if validated.iter().any(|q: &Player| q.name == p.name) {
                return Err(Error::schema(
                    format!("{path}.name"),
                    format!("duplicate player {:?}", p.name),
                ));
            }
            if p.menu.is_empty() {
                return Err(Error::EmptyMenu {
                    path: format!("{path}.menu"),
                });
            }
            let mut menu = Vec::with_capacity(p.menu.len());
            for (k, name) in p.menu.iter().enumerate() {
                let idx = item_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::UnknownItem {
                        path: format!("{path}.menu[{k}]"),
                        item: name.clone(),
                    })?;
                if menu.contains(&idx) {
                    return Err(Error::schema(
                        format!("{path}.menu[{k}]"),
                        format!("duplicate item {name:?}"),
                    ));
                }
                menu.push(idx);
            }
            let budget = match mode {
                Mode::Single => 1,
                Mode::Personalized => {
                    let b = p.budget.unwrap_or(1);
                    if b < 1 || b > menu.len() {
                        return Err(Error::BudgetOutOfRange {
                            path: format!("{path}.budget"),
                            budget: b,
                            menu_len: menu.len(),
                        });
                    }
                    b
                }
            };
            validated.push(Player {
                name: p.name,
                menu,
                budget,
            });
        }

        let mut game = Game {
            mode,
            users,
            items: item_names,
            sat,
            players: validated,
            strategies: Vec::new(),
            strategy_sat: Vec::new(),
        };
        game.strategies = game.players.iter().map(|p| strategy_space(mode, p)).collect();
        game.strategy_sat = game
            .strategies
            .iter()
            .map(|space| {
                space
                    .iter()
                    .map(|s| (0..game.users.len()).map(|u| game.best_of(u, s.items())).collect())
                    .collect()
            })
            .collect();
        Ok(game)
    }

    fn best_of(&self, user: usize, items: &[usize]) -> S {
        items.iter().fold(S::zero(), |acc, &l| acc.max_of(self.sat[l][user]))
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// σ_user(item)
    pub fn sat(&self, item: usize, user: usize) -> S {
        self.sat[item][user]
    }

    pub fn user_index(&self, name: &str) -> Option<usize> {
        self.users.iter().position(|u| u == name)
    }

    pub fn item_index(&self, name: &str) -> Option<usize> {
        self.items.iter().position(|l| l == name)
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p.name == name)
    }

    pub fn strategies(&self, player: usize) -> &[Strategy] {
        &self.strategies[player]
    }

    /// σ_user(X_player) for the player's `strategy`-th strategy.
    pub fn strategy_sat(&self, player: usize, strategy: usize, user: usize) -> S {
        self.strategy_sat[player][strategy][user]
    }

    /// Satisfaction of `user` with an arbitrary item set: the best item in the
    /// set, and zero for the empty set.
    pub fn satisfaction_of_strategy(&self, user: usize, items: &[usize]) -> Result<S> {
        if user >= self.users.len() {
            return Err(Error::UnknownUser {
                path: "user".into(),
                user: user.to_string(),
            });
        }
        if let Some(&bad) = items.iter().find(|&&l| l >= self.items.len()) {
            return Err(Error::UnknownItem {
                path: "strategy".into(),
                item: bad.to_string(),
            });
        }
        Ok(self.best_of(user, items))
    }

    /// `(σ_user(X_1), …, σ_user(X_N))`
    pub fn profile_sats(&self, profile: &StrategyProfile, user: usize) -> Vec<S> {
        profile
            .0
            .iter()
            .enumerate()
            .map(|(j, &s)| self.strategy_sat[j][s][user])
            .collect()
    }

    /// σ_user(X) = max_j σ_user(X_j), zero when no player offers anything.
    pub fn max_sat(&self, profile: &StrategyProfile, user: usize) -> S {
        profile
            .0
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (j, &s)| acc.max_of(self.strategy_sat[j][s][user]))
    }

    pub fn validate_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.0.len() != self.players.len() {
            return Err(Error::InvalidProfile(format!(
                "expected {} choices, got {}",
                self.players.len(),
                profile.0.len()
            )));
        }
        for (j, &s) in profile.0.iter().enumerate() {
            if s >= self.strategies[j].len() {
                return Err(Error::InvalidProfile(format!(
                    "player {} has {} strategies, index {s} given",
                    self.players[j].name,
                    self.strategies[j].len()
                )));
            }
        }
        Ok(())
    }

    /// Human-readable label of a strategy: `l2`, or `l1+l3` for item sets.
    pub fn strategy_label(&self, player: usize, strategy: usize) -> String {
        let items = self.strategies[player][strategy].items();
        if items.is_empty() {
            return "{}".into();
        }
        items
            .iter()
            .map(|&l| self.items[l].as_str())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn profile_label(&self, profile: &StrategyProfile) -> String {
        profile
            .0
            .iter()
            .enumerate()
            .map(|(j, &s)| self.strategy_label(j, s))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses a comma-separated profile such as `l2,l3`; item sets are joined
    /// with `+` (`l1+l2,l3`).
    pub fn parse_profile(&self, text: &str) -> Result<StrategyProfile> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != self.players.len() {
            return Err(Error::InvalidProfile(format!(
                "{text:?} has {} entries but the game has {} players",
                parts.len(),
                self.players.len()
            )));
        }
        let mut choices = Vec::with_capacity(parts.len());
        for (j, part) in parts.iter().enumerate() {
            let mut items = Vec::new();
            for name in part.split('+').map(str::trim).filter(|s| !s.is_empty()) {
                let idx = self.item_index(name).ok_or_else(|| Error::UnknownItem {
                    path: format!("profile[{j}]"),
                    item: name.to_string(),
                })?;
                items.push(idx);
            }
            let wanted = Strategy::new(items);
            let s = self.strategies[j].iter().position(|s| *s == wanted).ok_or_else(|| {
                Error::InvalidProfile(format!(
                    "{part:?} is not an available strategy of player {}",
                    self.players[j].name
                ))
            })?;
            choices.push(s);
        }
        Ok(StrategyProfile(choices))
    }

    /// Number of strategy profiles (saturating).
    pub fn profile_space_size(&self) -> u128 {
        self.strategies
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    /// Every profile exactly once, lexicographic in menu order (the last
    /// player's choice varies fastest).
    pub fn enumerate_profiles(&self, cap: u128) -> Result<ProfileIter> {
        let size = self.profile_space_size();
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        Ok(ProfileIter {
            radices: self.strategies.iter().map(Vec::len).collect(),
            next: Some(vec![0; self.players.len()]),
        })
    }

    /// Position of `profile` in enumeration order.
    pub fn profile_index(&self, profile: &StrategyProfile) -> usize {
        profile
            .0
            .iter()
            .zip(&self.strategies)
            .fold(0usize, |acc, (&s, space)| acc * space.len() + s)
    }

    pub fn profile_at(&self, mut index: usize) -> StrategyProfile {
        let mut choices = vec![0; self.players.len()];
        for (j, space) in self.strategies.iter().enumerate().rev() {
            choices[j] = index % space.len();
            index /= space.len();
        }
        StrategyProfile(choices)
    }

    /// Copy of the game without one user (used by the User-Independence check).
    pub fn without_user(&self, user: usize) -> Result<Game<S>> {
        let users = self
            .users
            .iter()
            .enumerate()
            .filter(|&(u, _)| u != user)
            .map(|(_, n)| n.clone())
            .collect();
        let items = self
            .items
            .iter()
            .zip(&self.sat)
            .map(|(name, row)| {
                let sat = row
                    .iter()
                    .enumerate()
                    .filter(|&(u, _)| u != user)
                    .map(|(_, v)| *v)
                    .collect();
                ItemSpec::new(name.clone(), sat)
            })
            .collect();
        Game::new(self.mode, users, items, self.player_specs())
    }

    /// Copy of the game with one more user whose satisfaction with item `l`
    /// is `satisfaction[l]`.
    pub fn with_extra_user(&self, name: impl Into<String>, satisfaction: &[S]) -> Result<Game<S>> {
        let mut users = self.users.clone();
        users.push(name.into());
        let items = self
            .items
            .iter()
            .zip(&self.sat)
            .zip(satisfaction)
            .map(|((n, row), v)| {
                let mut sat = row.clone();
                sat.push(*v);
                ItemSpec::new(n.clone(), sat)
            })
            .collect();
        Game::new(self.mode, users, items, self.player_specs())
    }

    fn player_specs(&self) -> Vec<PlayerSpec> {
        self.players
            .iter()
            .map(|p| PlayerSpec {
                name: p.name.clone(),
                menu: p.menu.iter().map(|&l| self.items[l].clone()).collect(),
                budget: Some(p.budget),
            })
            .collect()
    }

    /// Same game evaluated in binary floating point.
    pub fn to_float(&self) -> Game<f64> {
        let items = self
            .items
            .iter()
            .zip(&self.sat)
            .map(|(n, row)| ItemSpec::new(n.clone(), row.iter().map(Scalar::to_f64).collect()))
            .collect();
        Game::new(self.mode, self.users.clone(), items, self.player_specs())
            .expect("float image of a valid game is valid")
    }

    /// Game-file representation. Exact games write `p/q` strings, float games
    /// write JSON numbers.
    pub fn to_json(&self) -> Value {
        let mut items = Map::new();
        for (name, row) in self.items.iter().zip(&self.sat) {
            let mut entry = Map::new();
            for (u, v) in self.users.iter().zip(row) {
                let value = if S::EXACT {
                    Value::String(v.to_string())
                } else {
                    serde_json::Number::from_f64(v.to_f64())
                        .map(Value::Number)
                        .unwrap_or(Value::Null)
                };
                entry.insert(u.clone(), value);
            }
            items.insert(name.clone(), Value::Object(entry));
        }
        let players = self
            .players
            .iter()
            .map(|p| {
                serde_json::json!({
                    "name": p.name,
                    "menu": p.menu.iter().map(|&l| self.items[l].clone()).collect::<Vec<_>>(),
                    "budget": p.budget,
                })
            })
            .collect::<Vec<_>>();
        serde_json::json!({
            "mode": self.mode,
            "users": self.users,
            "items": Value::Object(items),
            "players": players,
        })
    }
}

fn in_unit_interval<S: Scalar>(v: &S) -> bool {
    if !S::EXACT && !v.to_f64().is_finite() {
        return false;
    }
    *v >= S::zero() && *v <= S::one()
}

fn strategy_space(mode: Mode, player: &Player) -> Vec<Strategy> {
    match mode {
        Mode::Single => player.menu.iter().map(|&l| Strategy(vec![l])).collect(),
        Mode::Personalized => {
            // Non-empty subsets of size ≤ budget, by size then lexicographic
            // in menu order.
            let mut out = Vec::new();
            let m = player.menu.len();
            for size in 1..=player.budget.min(m) {
                let mut idx: Vec<usize> = (0..size).collect();
                loop {
                    out.push(Strategy::new(idx.iter().map(|&k| player.menu[k]).collect()));
                    let mut pos = size;
                    while pos > 0 && idx[pos - 1] == m - size + pos - 1 {
                        pos -= 1;
                    }
                    if pos == 0 {
                        break;
                    }
                    idx[pos - 1] += 1;
                    for k in pos..size {
                        idx[k] = idx[k - 1] + 1;
                    }
                }
            }
            out
        }
    }
}

/// Iterator over every profile of a game.
#[derive(Clone, Debug)]
pub struct ProfileIter {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for ProfileIter {
    type Item = StrategyProfile;

    fn next(&mut self) -> Option<StrategyProfile> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for k in (0..succ.len()).rev() {
            succ[k] += 1;
            if succ[k] < self.radices[k] {
                carried = false;
                break;
            }
            succ[k] = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(StrategyProfile(current))
    }
}

/// Ascending satisfaction levels of one user under one profile, with the
/// rank of every player.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedLevels<S> {
    /// `levels[0] = 0`, then the N satisfaction levels ascending (duplicates kept).
    pub levels: Vec<S>,
    /// `rank[j]` is the 1-based position of player j in `levels`.
    pub rank: Vec<usize>,
}

impl<S: Scalar> SortedLevels<S> {
    /// Tied levels get consecutive ranks in player-index order.
    pub fn from_values(values: &[S]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut levels = Vec::with_capacity(values.len() + 1);
        levels.push(S::zero());
        let mut rank = vec![0; values.len()];
        for (pos, &j) in order.iter().enumerate() {
            levels.push(values[j]);
            rank[j] = pos + 1;
        }
        SortedLevels { levels, rank }
    }

    pub fn num_players(&self) -> usize {
        self.rank.len()
    }

    /// σ^N, the best level offered.
    pub fn top(&self) -> S {
        *self.levels.last().expect("levels always hold the zero sentinel")
    }

    /// σ of player j.
    pub fn value_of(&self, player: usize) -> S {
        self.levels[self.rank[player]]
    }
}

pub fn sorted_levels<S: Scalar>(game: &Game<S>, profile: &StrategyProfile, user: usize) -> SortedLevels<S> {
    SortedLevels::from_values(&game.profile_sats(profile, user))
}

/// A parsed game file: exact when every satisfaction entry is exact.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyGame {
    Exact(Game<Rational>),
    Float(Game<f64>),
}

impl AnyGame {
    pub fn to_json(&self) -> Value {
        match self {
            AnyGame::Exact(g) => g.to_json(),
            AnyGame::Float(g) => g.to_json(),
        }
    }
}

impl From<Game<Rational>> for AnyGame {
    fn from(g: Game<Rational>) -> Self {
        AnyGame::Exact(g)
    }
}

impl From<Game<f64>> for AnyGame {
    fn from(g: Game<f64>) -> Self {
        AnyGame::Float(g)
    }
}

enum Entry {
    Exact(Rational),
    Float(f64),
}

impl Entry {
    fn to_f64(&self) -> f64 {
        match self {
            Entry::Exact(r) => r.to_f64(),
            Entry::Float(f) => *f,
        }
    }
}

/// Parses and validates a JSON game file.
pub fn parse_game(bytes: &[u8]) -> Result<AnyGame> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| Error::schema("$", e.to_string()))?;
    let root = doc
        .as_object()
        .ok_or_else(|| Error::schema("$", "expected a JSON object"))?;

    let mode = match root.get("mode") {
        None => Mode::Single,
        Some(Value::String(s)) if s == "single" => Mode::Single,
        Some(Value::String(s)) if s == "personalized" => Mode::Personalized,
        Some(other) => {
            return Err(Error::schema(
                "mode",
                format!("expected \"single\" or \"personalized\", got {other}"),
            ))
        }
    };

    let users: Vec<String> = root
        .get("users")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::schema("users", "expected an array of user ids"))?
        .iter()
        .enumerate()
        .map(|(i, u)| {
            u.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::schema(format!("users[{i}]"), "expected a string"))
        })
        .collect::<Result<_>>()?;

    let items_obj = root
        .get("items")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::schema("items", "expected an object of item rows"))?;
    let mut rows: Vec<(String, Vec<Entry>)> = Vec::with_capacity(items_obj.len());
    for (name, row) in items_obj {
        let path = format!("items.{name}");
        let row = row
            .as_object()
            .ok_or_else(|| Error::schema(&path, "expected an object mapping users to satisfaction"))?;
        for key in row.keys() {
            if !users.contains(key) {
                return Err(Error::UnknownUser {
                    path: format!("{path}.{key}"),
                    user: key.clone(),
                });
            }
        }
        let mut entries = Vec::with_capacity(users.len());
        for u in &users {
            let cell_path = format!("{path}.{u}");
            let cell = row
                .get(u)
                .ok_or_else(|| Error::schema(&cell_path, "missing satisfaction entry"))?;
            entries.push(parse_entry(cell, &cell_path)?);
        }
        rows.push((name.clone(), entries));
    }

    let players: Vec<PlayerSpec> = root
        .get("players")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::schema("players", "expected an array of players"))?
        .iter()
        .enumerate()
        .map(|(j, p)| parse_player(p, j))
        .collect::<Result<_>>()?;

    let exact = rows.iter().all(|(_, r)| r.iter().all(|e| matches!(e, Entry::Exact(_))));
    if exact {
        let items = rows
            .into_iter()
            .map(|(n, r)| {
                let sat = r
                    .into_iter()
                    .map(|e| match e {
                        Entry::Exact(v) => v,
                        Entry::Float(_) => unreachable!(),
                    })
                    .collect();
                ItemSpec::new(n, sat)
            })
            .collect();
        Ok(AnyGame::Exact(Game::new(mode, users, items, players)?))
    } else {
        let items = rows
            .into_iter()
            .map(|(n, r)| ItemSpec::new(n, r.iter().map(Entry::to_f64).collect()))
            .collect();
        Ok(AnyGame::Float(Game::new(mode, users, items, players)?))
    }
}

fn parse_entry(cell: &Value, path: &str) -> Result<Entry> {
    let entry = match cell {
        Value::String(s) => Entry::Exact(s.parse::<Rational>().map_err(|e| Error::schema(path, e.to_string()))?),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Entry::Exact(Rational::from_integer(i as i128))
            } else if let Some(f) = n.as_f64() {
                Entry::Float(f)
            } else {
                return Err(Error::schema(path, format!("unrepresentable number {n}")));
            }
        }
        other => {
            return Err(Error::schema(
                path,
                format!("expected a number or numeric string, got {other}"),
            ))
        }
    };
    let in_range = match &entry {
        Entry::Exact(r) => *r >= Rational::zero() && *r <= Rational::one(),
        Entry::Float(f) => (0.0..=1.0).contains(f),
    };
    if !in_range {
        return Err(Error::SatisfactionOutOfRange {
            path: path.to_string(),
            value: cell.to_string(),
        });
    }
    Ok(entry)
}

fn parse_player(p: &Value, j: usize) -> Result<PlayerSpec> {
    let path = format!("players[{j}]");
    let obj = p
        .as_object()
        .ok_or_else(|| Error::schema(&path, "expected an object"))?;
    let name = match obj.get("name") {
        Some(Value::String(s)) => s.clone(),
        None => format!("p{}", j + 1),
        Some(_) => return Err(Error::schema(format!("{path}.name"), "expected a string")),
    };
    let menu = obj
        .get("menu")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::schema(format!("{path}.menu"), "expected an array of item names"))?
        .iter()
        .enumerate()
        .map(|(k, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::schema(format!("{path}.menu[{k}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>>>()?;
    let budget = match obj.get("budget") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| Error::schema(format!("{path}.budget"), "expected a non-negative integer"))?
                as usize,
        ),
    };
    Ok(PlayerSpec { name, menu, budget })
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = r#"{
        "mode": "single",
        "users": ["u1", "u2", "u3"],
        "items": {
            "l1": {"u1": "0.1", "u2": "0.9", "u3": "0.2"},
            "l2": {"u1": "0.8", "u2": "0.7", "u3": "0.9"},
            "l3": {"u1": "0.9", "u2": "0.8", "u3": "0.1"}
        },
        "players": [
            {"name": "p1", "menu": ["l1", "l2"]},
            {"name": "p2", "menu": ["l3"]}
        ]
    }"#;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn example1() -> Game<Rational> {
        match parse_game(EXAMPLE1.as_bytes()).unwrap() {
            AnyGame::Exact(g) => g,
            AnyGame::Float(_) => panic!("expected an exact game"),
        }
    }

    #[test]
    fn parses_example_one() {
        let g = example1();
        assert_eq!(g.num_players(), 2);
        assert_eq!(g.num_users(), 3);
        assert_eq!(g.sat(1, 0), r(4, 5));
    }

    #[test]
    fn float_literals_make_a_float_game() {
        let doc = EXAMPLE1.replace("\"0.1\"", "0.1");
        assert!(matches!(parse_game(doc.as_bytes()).unwrap(), AnyGame::Float(_)));
        let ints = EXAMPLE1.replace("\"0.1\"", "0");
        assert!(matches!(parse_game(ints.as_bytes()).unwrap(), AnyGame::Exact(_)));
    }

    #[test]
    fn rejects_out_of_range_satisfaction() {
        let doc = EXAMPLE1.replace("\"0.1\"", "1.2");
        let err = parse_game(doc.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::SatisfactionOutOfRange { .. }), "{err}");
        assert!(err.to_string().contains("satisfaction outside [0,1]"));
        assert!(err.to_string().contains("items.l1.u1"));
    }

    #[test]
    fn rejects_budget_above_menu() {
        let doc = EXAMPLE1
            .replace("\"single\"", "\"personalized\"")
            .replace(r#""menu": ["l1", "l2"]"#, r#""menu": ["l1", "l2"], "budget": 3"#);
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
        assert!(err.to_string().contains("players[0].budget"));
    }

    #[test]
    fn budget_ignored_in_single_mode() {
        let doc = EXAMPLE1.replace(r#""menu": ["l1", "l2"]"#, r#""menu": ["l1", "l2"], "budget": 7"#);
        assert!(parse_game(doc.as_bytes()).is_ok());
    }

    #[test]
    fn rejects_unknown_item_and_empty_menu() {
        let doc = EXAMPLE1.replace(r#"["l3"]"#, r#"["l9"]"#);
        let err = parse_game(doc.as_bytes()).unwrap_err();
        assert!(
            matches!(err, Error::UnknownItem { ref path, .. } if path == "players[1].menu[0]"),
            "{err}"
        );
        let doc = EXAMPLE1.replace(r#"["l3"]"#, "[]");
        assert!(matches!(
            parse_game(doc.as_bytes()).unwrap_err(),
            Error::EmptyMenu { .. }
        ));
    }

    #[test]
    fn rejects_schema_violations() {
        assert!(matches!(parse_game(b"[]").unwrap_err(), Error::Schema { .. }));
        let doc = EXAMPLE1.replace(r#""u3": "0.2""#, r#""u3": "zero""#);
        assert!(matches!(parse_game(doc.as_bytes()).unwrap_err(), Error::Schema { .. }));
        let doc = EXAMPLE1.replace(r#", "u3": "0.2""#, "");
        let err = parse_game(doc.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("items.l1.u3"), "{err}");
    }

    #[test]
    fn satisfaction_of_strategies() {
        let g = example1();
        assert_eq!(g.satisfaction_of_strategy(0, &[1]).unwrap(), r(4, 5));
        assert_eq!(g.satisfaction_of_strategy(0, &[0, 1]).unwrap(), r(4, 5));
        assert_eq!(g.satisfaction_of_strategy(0, &[]).unwrap(), Rational::zero());
        assert!(g.satisfaction_of_strategy(7, &[0]).is_err());
        assert!(g.satisfaction_of_strategy(0, &[9]).is_err());
    }

    #[test]
    fn sorted_levels_example_two() {
        let g = example1();
        let x = g.parse_profile("l2,l3").unwrap();
        let lv = sorted_levels(&g, &x, 2);
        assert_eq!(lv.levels, vec![Rational::zero(), r(1, 10), r(9, 10)]);
        assert_eq!(lv.rank, vec![2, 1]);
    }

    #[test]
    fn sorted_levels_ties_and_order() {
        let c = r(2, 5);
        let lv = SortedLevels::from_values(&[c, c, c]);
        assert_eq!(lv.levels, vec![Rational::zero(), c, c, c]);
        assert_eq!(lv.rank, vec![1, 2, 3]);
        let lv = SortedLevels::from_values(&[r(7, 10), r(3, 10), r(1, 2)]);
        assert_eq!(lv.levels, vec![Rational::zero(), r(3, 10), r(1, 2), r(7, 10)]);
        assert_eq!(lv.rank, vec![3, 1, 2]);
    }

    #[test]
    fn enumerates_profiles_in_menu_order() {
        let g = example1();
        let all: Vec<String> = g
            .enumerate_profiles(DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .map(|x| g.profile_label(&x))
            .collect();
        assert_eq!(all, vec!["l1,l3", "l2,l3"]);
        assert!(matches!(
            g.enumerate_profiles(1).unwrap_err(),
            Error::CapExceeded { size: 2, cap: 1 }
        ));
    }

    #[test]
    fn personalized_strategy_count() {
        let g: Game<Rational> = Game::new(
            Mode::Personalized,
            vec!["u".into()],
            vec![
                ItemSpec::new("a", vec![r(1, 10)]),
                ItemSpec::new("b", vec![r(1, 2)]),
                ItemSpec::new("c", vec![r(1, 5)]),
            ],
            vec![PlayerSpec::new("p", ["a", "b", "c"]).with_budget(2)],
        )
        .unwrap();
        assert_eq!(g.strategies(0).len(), 6);
        assert_eq!(g.enumerate_profiles(DEFAULT_ENUMERATION_CAP).unwrap().count(), 6);
        let labels: Vec<String> = (0..6).map(|s| g.strategy_label(0, s)).collect();
        assert_eq!(labels, vec!["a", "b", "c", "a+b", "a+c", "b+c"]);
        let ab = g.parse_profile("b+a").unwrap();
        assert_eq!(g.strategy_sat(0, ab.0[0], 0), r(1, 2));
    }

    #[test]
    fn profile_index_roundtrip() {
        let g = example1();
        for (k, x) in g.enumerate_profiles(DEFAULT_ENUMERATION_CAP).unwrap().enumerate() {
            assert_eq!(g.profile_index(&x), k);
            assert_eq!(g.profile_at(k), x);
        }
    }

    #[test]
    fn user_removal_and_addition() {
        let g = example1();
        let smaller = g.without_user(1).unwrap();
        assert_eq!(smaller.users(), &["u1".to_string(), "u3".to_string()]);
        assert_eq!(smaller.sat(0, 1), r(1, 5));
        let bigger = g.with_extra_user("u4", &[r(1, 3), r(0, 1), r(1, 1)]).unwrap();
        assert_eq!(bigger.num_users(), 4);
        assert_eq!(bigger.sat(2, 3), Rational::one());
    }
}
