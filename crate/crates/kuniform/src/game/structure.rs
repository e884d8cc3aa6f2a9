//! Dependency and smoothness analysis.
//!
//! Player j is a dependency of player i when some unilateral change of j's
//! action moves u_i at fixed context. The Lipschitz constant is the largest
//! such move over all i and j != i.

use super::{Form, Game, GameError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyStructure {
    /// Verified dependency set per player (ascending, never contains the
    /// player itself).
    pub deps: Vec<Vec<usize>>,
    /// `max_i |deps[i]|`.
    pub degree: usize,
}

/// Scan one player's payoff for sensitivity to each candidate player.
/// `fiber_extremes(i, j)` yields (max, min) payoff gaps over all contexts.
fn dense_fiber_gap(game: &Game, tensor: &[f64], i: usize, j: usize) -> f64 {
    let n = game.players();
    let m = game.actions();
    let _ = i;
    let stride_j = m.pow((n - 1 - j) as u32);
    let size = tensor.len();
    let mut gap = 0.0f64;
    // Walk every index whose j-digit is zero; the fiber is the m strided
    // entries above it.
    let block = stride_j * m;
    let mut base_block = 0;
    while base_block < size {
        for offset in 0..stride_j {
            let base = base_block + offset;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for a in 0..m {
                let v = tensor[base + a * stride_j];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            gap = gap.max(hi - lo);
        }
        base_block += block;
    }
    gap
}

fn graphical_fiber_gap(table: &[f64], axes: usize, m: usize, axis: usize) -> f64 {
    let stride = m.pow((axes - 1 - axis) as u32);
    let block = stride * m;
    let mut gap = 0.0f64;
    let mut base_block = 0;
    while base_block < table.len() {
        for offset in 0..stride {
            let base = base_block + offset;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for a in 0..m {
                let v = table[base + a * stride];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            gap = gap.max(hi - lo);
        }
        base_block += block;
    }
    gap
}

fn scan_budget(game: &Game, budget: u64) -> Result<(), GameError> {
    let n = game.players() as u128;
    let m = game.actions() as u128;
    let needed = match game.form() {
        Form::Dense(_) => n * (n - 1).max(1) * m.pow(game.players() as u32),
        Form::Graphical(locals) => locals
            .iter()
            .map(|l| (l.deps.len() as u128 + 1) * l.table.len() as u128)
            .sum(),
    };
    if needed > budget as u128 {
        return Err(GameError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Verified dependency sets: declared structure is rechecked, vacuous
/// dependencies (whose action never moves the payoff) are dropped.
pub fn dependency_structure(game: &Game, budget: u64) -> Result<DependencyStructure, GameError> {
    scan_budget(game, budget)?;
    let n = game.players();
    let mut deps: Vec<Vec<usize>> = Vec::with_capacity(n);
    match game.form() {
        Form::Dense(tensors) => {
            for i in 0..n {
                let mut d = Vec::new();
                for j in 0..n {
                    if j != i && dense_fiber_gap(game, &tensors[i], i, j) > 0.0 {
                        d.push(j);
                    }
                }
                deps.push(d);
            }
        }
        Form::Graphical(locals) => {
            for (i, local) in locals.iter().enumerate() {
                let axes = local.deps.len() + 1;
                let mut d = Vec::new();
                for (pos, &j) in local.deps.iter().enumerate() {
                    // Own action is axis 0; dependency axes follow.
                    if graphical_fiber_gap(&local.table, axes, game.actions(), pos + 1) > 0.0 {
                        d.push(j);
                    }
                }
                let _ = i;
                deps.push(d);
            }
        }
    }
    let degree = deps.iter().map(Vec::len).max().unwrap_or(0);
    Ok(DependencyStructure { deps, degree })
}

/// Smallest λ such that any other player's unilateral action change moves
/// any payoff by at most λ. Zero for single-player or constant games.
pub fn lipschitz_constant(game: &Game, budget: u64) -> Result<f64, GameError> {
    scan_budget(game, budget)?;
    let n = game.players();
    let mut lambda = 0.0f64;
    match game.form() {
        Form::Dense(tensors) => {
            for (i, tensor) in tensors.iter().enumerate() {
                for j in 0..n {
                    if j != i {
                        lambda = lambda.max(dense_fiber_gap(game, tensor, i, j));
                    }
                }
            }
        }
        Form::Graphical(locals) => {
            for local in locals {
                let axes = local.deps.len() + 1;
                for pos in 0..local.deps.len() {
                    lambda =
                        lambda.max(graphical_fiber_gap(&local.table, axes, game.actions(), pos + 1));
                }
            }
        }
    }
    Ok(lambda)
}
