//! Multilinear payoff evaluation.
//!
//! Expected payoffs are exact sums over the support product, never sampled.
//! Every entry point takes a term budget and refuses evaluations whose
//! support product would exceed it.

use super::{Form, Game, GameError, KUniformProfile, MixedProfile, PlayerRegret, RegretReport};

/// Default cap on multilinear terms per evaluation (10^8).
pub const DEFAULT_EVAL_BUDGET: u64 = 100_000_000;

/// Anything that can price a player's actions: base games and lifted games
/// share this surface so diagnostics can run over either.
pub trait PayoffFn {
    fn players(&self) -> usize;
    fn actions(&self) -> usize;
    /// Payoff at a pure action profile (length `players()`).
    fn pure_payoff(&self, player: usize, profile: &[usize]) -> f64;
    /// Exact expected payoff of playing `own` against `x_{-player}`;
    /// `x[player]` is ignored.
    fn payoff_vs_mixed(
        &self,
        player: usize,
        own: usize,
        x: &MixedProfile,
        budget: u64,
    ) -> Result<f64, GameError>;
    /// Players whose action can influence `player`'s payoff.
    fn dependencies(&self, player: usize) -> Vec<usize>;
}

impl PayoffFn for Game {
    fn players(&self) -> usize {
        self.players()
    }

    fn actions(&self) -> usize {
        self.actions()
    }

    fn pure_payoff(&self, player: usize, profile: &[usize]) -> f64 {
        self.payoff(player, profile)
    }

    fn payoff_vs_mixed(
        &self,
        player: usize,
        own: usize,
        x: &MixedProfile,
        budget: u64,
    ) -> Result<f64, GameError> {
        Ok(br_table_supports(self, player, &x.all_support_pairs(), budget)?[own])
    }

    fn dependencies(&self, player: usize) -> Vec<usize> {
        self.declared_dependencies(player)
    }
}

fn check_player(game: &Game, player: usize) -> Result<(), GameError> {
    if player >= game.players() {
        return Err(GameError::PlayerIndex {
            player,
            players: game.players(),
        });
    }
    Ok(())
}

fn check_profile_shape(game: &Game, players: usize, actions: usize) -> Result<(), GameError> {
    if players != game.players() || actions != game.actions() {
        return Err(GameError::InvalidProfile(format!(
            "profile shape {players}x{actions} does not match game {}x{}",
            game.players(),
            game.actions()
        )));
    }
    Ok(())
}

/// Best-response table `T[b] = u_player(b, x_{-player})` computed from
/// per-player support pairs. `supports[player]` is ignored. This is the one
/// inner loop every exact evaluation in the crate goes through.
pub(crate) fn br_table_supports(
    game: &Game,
    player: usize,
    supports: &[Vec<(usize, f64)>],
    budget: u64,
) -> Result<Vec<f64>, GameError> {
    check_player(game, player)?;
    let m = game.actions();
    let n = game.players();

    // Opponents whose actions matter, with their support lists.
    let opponents: Vec<usize> = match game.form() {
        Form::Dense(_) => (0..n).filter(|&j| j != player).collect(),
        Form::Graphical(locals) => locals[player].deps.clone(),
    };
    let mut terms: u128 = m as u128;
    for &j in &opponents {
        if supports[j].is_empty() {
            return Err(GameError::InvalidProfile(format!(
                "player {j} has an empty support"
            )));
        }
        terms = terms.saturating_mul(supports[j].len() as u128);
    }
    if terms > budget as u128 {
        return Err(GameError::BudgetExceeded {
            needed: terms,
            budget,
        });
    }

    let mut table = vec![0.0f64; m];
    match game.form() {
        Form::Dense(tensors) => {
            // Strides into the row-major tensor, player 0 slowest.
            let stride = |p: usize| m.pow((n - 1 - p) as u32);
            let own_stride = stride(player);
            let tensor = &tensors[player];
            let mut cursor = vec![0usize; opponents.len()];
            loop {
                let mut weight = 1.0;
                let mut base = 0usize;
                for (pos, &j) in opponents.iter().enumerate() {
                    let (a, p) = supports[j][cursor[pos]];
                    weight *= p;
                    base += a * stride(j);
                }
                for (b, slot) in table.iter_mut().enumerate() {
                    *slot += weight * tensor[base + b * own_stride];
                }
                if !advance(&mut cursor, &opponents, supports) {
                    break;
                }
            }
        }
        Form::Graphical(locals) => {
            let local = &locals[player];
            let deps = local.deps.len();
            // Own action is the slowest axis of the local table.
            let own_stride = m.pow(deps as u32);
            let mut cursor = vec![0usize; deps];
            loop {
                let mut weight = 1.0;
                let mut base = 0usize;
                for (pos, &j) in opponents.iter().enumerate() {
                    let (a, p) = supports[j][cursor[pos]];
                    weight *= p;
                    base = base * m + a;
                }
                // base currently encodes dep digits; keep own axis separate.
                for (b, slot) in table.iter_mut().enumerate() {
                    *slot += weight * local.table[b * own_stride + base];
                }
                if !advance(&mut cursor, &opponents, supports) {
                    break;
                }
            }
        }
    }
    Ok(table)
}

/// Odometer step over the opponents' support lists; false when wrapped.
fn advance(cursor: &mut [usize], opponents: &[usize], supports: &[Vec<(usize, f64)>]) -> bool {
    for pos in (0..cursor.len()).rev() {
        cursor[pos] += 1;
        if cursor[pos] < supports[opponents[pos]].len() {
            return true;
        }
        cursor[pos] = 0;
    }
    false
}

/// `T[b] = u_player(b, x_{-player})` for every action `b`.
pub fn best_response_table(
    game: &Game,
    player: usize,
    x: &MixedProfile,
    budget: u64,
) -> Result<Vec<f64>, GameError> {
    check_profile_shape(game, x.players(), x.actions())?;
    br_table_supports(game, player, &x.all_support_pairs(), budget)
}

/// Exact expected payoff of `player` at the mixed profile `x`.
pub fn expected_payoff(
    game: &Game,
    player: usize,
    x: &MixedProfile,
    budget: u64,
) -> Result<f64, GameError> {
    let table = best_response_table(game, player, x, budget)?;
    Ok(x.support_pairs(player)
        .iter()
        .map(|&(a, p)| p * table[a])
        .sum())
}

/// Exact expected payoff of playing the pure action `own` against
/// `x_{-player}` (the entry for `player` in `x` is ignored).
pub fn payoff_vs_mixed(
    game: &Game,
    player: usize,
    own: usize,
    x: &MixedProfile,
    budget: u64,
) -> Result<f64, GameError> {
    check_profile_shape(game, x.players(), x.actions())?;
    if own >= game.actions() {
        return Err(GameError::InvalidProfile(format!(
            "action {own} out of range"
        )));
    }
    Ok(br_table_supports(game, player, &x.all_support_pairs(), budget)?[own])
}

pub(crate) fn regret_from_supports(
    game: &Game,
    supports: &[Vec<(usize, f64)>],
    budget: u64,
) -> Result<RegretReport, GameError> {
    let mut players = Vec::with_capacity(game.players());
    for i in 0..game.players() {
        let table = br_table_supports(game, i, supports, budget)?;
        let best_response = table.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let current: f64 = supports[i].iter().map(|&(a, p)| p * table[a]).sum();
        players.push(PlayerRegret {
            current,
            best_response,
            regret: (best_response - current).max(0.0),
        });
    }
    Ok(RegretReport::from_players(players))
}

/// Per-player and maximum regret of a mixed profile.
pub fn regret(game: &Game, x: &MixedProfile, budget: u64) -> Result<RegretReport, GameError> {
    check_profile_shape(game, x.players(), x.actions())?;
    regret_from_supports(game, &x.all_support_pairs(), budget)
}

/// Regret of a k-uniform profile (evaluated at its aggregate).
pub fn kuniform_regret(
    game: &Game,
    profile: &KUniformProfile,
    budget: u64,
) -> Result<RegretReport, GameError> {
    check_profile_shape(game, profile.players(), profile.actions())?;
    let k = profile.k() as f64;
    let supports: Vec<Vec<(usize, f64)>> = (0..profile.players())
        .map(|i| {
            profile
                .counts(i)
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(a, c)| (a, c as f64 / k))
                .collect()
        })
        .collect();
    regret_from_supports(game, &supports, budget)
}
