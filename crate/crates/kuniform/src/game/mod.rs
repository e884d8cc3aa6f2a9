//! Finite games with a uniform action count per player, in dense or
//! graphical (bounded-dependency) payoff form, plus the profile types the
//! rest of the crate works over.
//!
//! Payoffs always live in `[0, 1]`. Dense tensors are stored row-major with
//! player 0 as the slowest axis; a graphical player's local table puts the
//! own action on the slowest axis followed by its dependencies in ascending
//! player order.

mod eval;
mod structure;

pub use eval::{
    best_response_table, expected_payoff, kuniform_regret, payoff_vs_mixed, regret, PayoffFn,
    DEFAULT_EVAL_BUDGET,
};
pub(crate) use eval::br_table_supports;
pub use structure::{dependency_structure, lipschitz_constant, DependencyStructure};

use serde_json::Value;
use thiserror::Error;

/// Slack for equilibrium verdicts: a profile is an ε-equilibrium when its
/// max regret is at most `ε + REGRET_TOL`.
pub const REGRET_TOL: f64 = 1e-9;
/// Slack for exact-value agreement checks (representation equivalence,
/// small-probability tests, contraction bounds).
pub const VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("payoff out of range for player {player} at entry {index}: {value}")]
    PayoffOutOfRange {
        player: usize,
        index: usize,
        value: f64,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("player index {player} out of range for {players} players")]
    PlayerIndex { player: usize, players: usize },
    #[error("evaluation needs {needed} terms but the budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

/// Per-player local payoff table for the graphical form.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTable {
    /// Players (0-based, ascending, excluding the owner) whose actions enter
    /// the table.
    pub deps: Vec<usize>,
    /// Row-major over (own action, deps' actions), own action slowest,
    /// length `m^(deps.len() + 1)`.
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Dense(Vec<Vec<f64>>),
    Graphical(Vec<LocalTable>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    players: usize,
    actions: usize,
    form: Form,
    /// Free-form annotation carried through file round trips untouched.
    pub meta: Option<Value>,
}

fn check_unit_range(player: usize, data: &[f64]) -> Result<(), GameError> {
    for (index, &value) in data.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) || value.is_nan() {
            return Err(GameError::PayoffOutOfRange {
                player,
                index,
                value,
            });
        }
    }
    Ok(())
}

impl Game {
    /// Dense game from one flat `m^n` tensor per player.
    pub fn dense(players: usize, actions: usize, tensors: Vec<Vec<f64>>) -> Result<Self, GameError> {
        if players == 0 || actions == 0 {
            return Err(GameError::Dimension(
                "players and actions must be positive".into(),
            ));
        }
        if tensors.len() != players {
            return Err(GameError::Dimension(format!(
                "expected {} payoff tensors, got {}",
                players,
                tensors.len()
            )));
        }
        let want = actions
            .checked_pow(players as u32)
            .ok_or_else(|| GameError::Dimension("profile space overflows usize".into()))?;
        for (player, t) in tensors.iter().enumerate() {
            if t.len() != want {
                return Err(GameError::Dimension(format!(
                    "player {} tensor has {} entries, expected {}",
                    player,
                    t.len(),
                    want
                )));
            }
            check_unit_range(player, t)?;
        }
        Ok(Game {
            players,
            actions,
            form: Form::Dense(tensors),
            meta: None,
        })
    }

    /// Graphical game from one local table per player.
    pub fn graphical(
        players: usize,
        actions: usize,
        locals: Vec<LocalTable>,
    ) -> Result<Self, GameError> {
        if players == 0 || actions == 0 {
            return Err(GameError::Dimension(
                "players and actions must be positive".into(),
            ));
        }
        if locals.len() != players {
            return Err(GameError::Dimension(format!(
                "expected {} local tables, got {}",
                players,
                locals.len()
            )));
        }
        for (player, local) in locals.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &dep in &local.deps {
                if dep >= players {
                    return Err(GameError::PlayerIndex {
                        player: dep,
                        players,
                    });
                }
                if dep == player {
                    return Err(GameError::Dimension(format!(
                        "player {player} lists itself as a dependency"
                    )));
                }
                if prev.is_some_and(|p| p >= dep) {
                    return Err(GameError::Dimension(format!(
                        "player {player} dependencies must be strictly increasing"
                    )));
                }
                prev = Some(dep);
            }
            let want = actions
                .checked_pow(local.deps.len() as u32 + 1)
                .ok_or_else(|| GameError::Dimension("local table overflows usize".into()))?;
            if local.table.len() != want {
                return Err(GameError::Dimension(format!(
                    "player {} local table has {} entries, expected {}",
                    player,
                    local.table.len(),
                    want
                )));
            }
            check_unit_range(player, &local.table)?;
        }
        Ok(Game {
            players,
            actions,
            form: Form::Graphical(locals),
            meta: None,
        })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.form, Form::Dense(_))
    }

    /// Payoff of `player` at a pure action profile (length `players`).
    pub fn payoff(&self, player: usize, profile: &[usize]) -> f64 {
        debug_assert_eq!(profile.len(), self.players);
        debug_assert!(profile.iter().all(|&a| a < self.actions));
        match &self.form {
            Form::Dense(tensors) => {
                let mut idx = 0;
                for &a in profile {
                    idx = idx * self.actions + a;
                }
                tensors[player][idx]
            }
            Form::Graphical(locals) => {
                let local = &locals[player];
                let mut idx = profile[player];
                for &dep in &local.deps {
                    idx = idx * self.actions + profile[dep];
                }
                local.table[idx]
            }
        }
    }

    /// Declared dependency list: everyone else for the dense form, the local
    /// table's players for the graphical form. (See [`dependency_structure`]
    /// for the verified version.)
    pub fn declared_dependencies(&self, player: usize) -> Vec<usize> {
        match &self.form {
            Form::Dense(_) => (0..self.players).filter(|&j| j != player).collect(),
            Form::Graphical(locals) => locals[player].deps.clone(),
        }
    }

    /// Materialize any form as dense. `budget` caps the `n * m^n` entries
    /// written.
    pub fn densify(&self, budget: u64) -> Result<Game, GameError> {
        let entries = (self.players as u128)
            * (self.actions as u128).pow(self.players as u32);
        if entries > budget as u128 {
            return Err(GameError::BudgetExceeded {
                needed: entries,
                budget,
            });
        }
        let size = self.actions.pow(self.players as u32);
        let mut tensors = vec![vec![0.0; size]; self.players];
        let mut profile = vec![0usize; self.players];
        for idx in 0..size {
            let mut rem = idx;
            for p in (0..self.players).rev() {
                profile[p] = rem % self.actions;
                rem /= self.actions;
            }
            for (player, tensor) in tensors.iter_mut().enumerate() {
                tensor[idx] = self.payoff(player, &profile);
            }
        }
        let mut g = Game::dense(self.players, self.actions, tensors)?;
        g.meta = self.meta.clone();
        Ok(g)
    }
}

/// One mixed strategy per player; every vector has the same length and sums
/// to 1 within [`REGRET_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    strategies: Vec<Vec<f64>>,
}

impl MixedProfile {
    pub fn new(strategies: Vec<Vec<f64>>) -> Result<Self, GameError> {
        if strategies.is_empty() {
            return Err(GameError::InvalidProfile("no players".into()));
        }
        let m = strategies[0].len();
        for (player, s) in strategies.iter().enumerate() {
            if s.len() != m || m == 0 {
                return Err(GameError::InvalidProfile(format!(
                    "player {player} strategy length {} differs from {m}",
                    s.len()
                )));
            }
            let mut sum = 0.0;
            for &p in s {
                if !(p >= 0.0) {
                    return Err(GameError::InvalidProfile(format!(
                        "player {player} has a negative or NaN probability: {p}"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > REGRET_TOL {
                return Err(GameError::InvalidProfile(format!(
                    "player {player} probabilities sum to {sum}"
                )));
            }
        }
        Ok(MixedProfile { strategies })
    }

    pub fn uniform(players: usize, actions: usize) -> Self {
        let p = 1.0 / actions as f64;
        MixedProfile {
            strategies: vec![vec![p; actions]; players],
        }
    }

    pub fn pure(players: usize, actions: usize, profile: &[usize]) -> Self {
        debug_assert_eq!(profile.len(), players);
        let mut strategies = vec![vec![0.0; actions]; players];
        for (player, &a) in profile.iter().enumerate() {
            strategies[player][a] = 1.0;
        }
        MixedProfile { strategies }
    }

    pub fn players(&self) -> usize {
        self.strategies.len()
    }

    pub fn actions(&self) -> usize {
        self.strategies[0].len()
    }

    pub fn strategy(&self, player: usize) -> &[f64] {
        &self.strategies[player]
    }

    pub fn strategies(&self) -> &[Vec<f64>] {
        &self.strategies
    }

    /// `(action, probability)` pairs with positive probability.
    pub fn support_pairs(&self, player: usize) -> Vec<(usize, f64)> {
        self.strategies[player]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(a, &p)| (a, p))
            .collect()
    }

    pub(crate) fn all_support_pairs(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.players()).map(|i| self.support_pairs(i)).collect()
    }
}

/// One size-`k` action multiset per player, kept in canonical nondecreasing
/// order. Aggregating gives the mixed profile with probabilities `count/k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KUniformProfile {
    k: usize,
    actions: usize,
    multisets: Vec<Vec<usize>>,
}

impl KUniformProfile {
    pub fn new(actions: usize, multisets: Vec<Vec<usize>>) -> Result<Self, GameError> {
        if multisets.is_empty() {
            return Err(GameError::InvalidProfile("no players".into()));
        }
        let k = multisets[0].len();
        if k == 0 {
            return Err(GameError::InvalidProfile("k must be positive".into()));
        }
        let mut sorted = multisets;
        for (player, ms) in sorted.iter_mut().enumerate() {
            if ms.len() != k {
                return Err(GameError::InvalidProfile(format!(
                    "player {player} multiset has {} entries, expected {k}",
                    ms.len()
                )));
            }
            if ms.iter().any(|&a| a >= actions) {
                return Err(GameError::InvalidProfile(format!(
                    "player {player} multiset uses an action >= {actions}"
                )));
            }
            ms.sort_unstable();
        }
        Ok(KUniformProfile {
            k,
            actions,
            multisets: sorted,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn players(&self) -> usize {
        self.multisets.len()
    }

    pub fn multiset(&self, player: usize) -> &[usize] {
        &self.multisets[player]
    }

    pub fn multisets(&self) -> &[Vec<usize>] {
        &self.multisets
    }

    /// Action counts for one player, length `actions`.
    pub fn counts(&self, player: usize) -> Vec<usize> {
        let mut c = vec![0usize; self.actions];
        for &a in &self.multisets[player] {
            c[a] += 1;
        }
        c
    }

    /// The mixed profile with `x_i(a) = count_i(a) / k`.
    pub fn aggregate(&self) -> MixedProfile {
        let k = self.k as f64;
        let strategies = (0..self.players())
            .map(|i| self.counts(i).into_iter().map(|c| c as f64 / k).collect())
            .collect();
        MixedProfile { strategies }
    }
}

/// One player's slice of a regret report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayerRegret {
    /// Expected payoff at the profile under scrutiny.
    pub current: f64,
    /// Best achievable payoff against the others' play.
    pub best_response: f64,
    /// `best_response - current`, clamped at zero.
    pub regret: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub players: Vec<PlayerRegret>,
    pub max_regret: f64,
}

impl RegretReport {
    pub(crate) fn from_players(players: Vec<PlayerRegret>) -> Self {
        let max_regret = players.iter().map(|p| p.regret).fold(0.0, f64::max);
        RegretReport {
            players,
            max_regret,
        }
    }

    /// Weak-inequality verdict: max regret at most `epsilon + REGRET_TOL`.
    pub fn is_epsilon_equilibrium(&self, epsilon: f64) -> bool {
        self.max_regret <= epsilon + REGRET_TOL
    }
}
