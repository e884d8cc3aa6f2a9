//! Seeded instance generators. Every kind is a pure function of
//! `(kind, params, seed)`: same inputs, same game, bit for bit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Game, GameError, LocalTable};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("unknown generator kind \"{0}\"")]
    UnknownKind(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GenParams {
    pub players: usize,
    pub actions: usize,
    /// Dependency count for the graphical kinds; ignored elsewhere.
    #[serde(default)]
    pub degree: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            players: 2,
            actions: 2,
            degree: 1,
        }
    }
}

pub const GENERATOR_KINDS: [&str; 7] = [
    "random-dense",
    "matching-pennies",
    "coordination",
    "zero-sum-random",
    "graphical-ring",
    "graphical-random",
    "uniform-equilibrium",
];

fn tensor_size(n: usize, m: usize) -> Result<usize, GenError> {
    m.checked_pow(n as u32)
        .ok_or_else(|| GenError::InvalidParams("profile space overflows usize".into()))
}

fn random_tensors(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>, GenError> {
    let size = tensor_size(n, m)?;
    Ok((0..n)
        .map(|_| (0..size).map(|_| rng.gen::<f64>()).collect())
        .collect())
}

/// The classic two-player matching game: the row player scores on a match,
/// the column player on a mismatch.
fn matching_pennies() -> Result<Game, GenError> {
    let u1 = vec![1.0, 0.0, 0.0, 1.0];
    let u2 = u1.iter().map(|v| 1.0 - v).collect();
    Ok(Game::dense(2, 2, vec![u1, u2])?)
}

fn coordination(n: usize, m: usize) -> Result<Game, GenError> {
    let size = tensor_size(n, m)?;
    let mut tensor = vec![0.0; size];
    // All-equal profiles sit at indices a * (m^(n-1) + ... + 1).
    let stride: usize = (0..n).map(|p| m.pow(p as u32)).sum();
    for a in 0..m {
        tensor[a * stride] = 1.0;
    }
    Ok(Game::dense(n, m, vec![tensor; n])?)
}

fn zero_sum_random(m: usize, rng: &mut ChaCha8Rng) -> Result<Game, GenError> {
    let size = tensor_size(2, m)?;
    let u1: Vec<f64> = (0..size).map(|_| rng.gen::<f64>()).collect();
    let u2 = u1.iter().map(|v| 1.0 - v).collect();
    Ok(Game::dense(2, m, vec![u1, u2])?)
}

fn ring_deps(n: usize, d: usize, player: usize) -> Vec<usize> {
    let mut deps: Vec<usize> = (1..=d).map(|step| (player + step) % n).collect();
    deps.sort_unstable();
    deps
}

fn graphical_ring(p: GenParams, rng: &mut ChaCha8Rng) -> Result<Game, GenError> {
    let (n, m, d) = (p.players, p.actions, p.degree);
    if d >= n {
        return Err(GenError::InvalidParams(format!(
            "ring degree {d} needs at least {} players",
            d + 1
        )));
    }
    let table_len = m
        .checked_pow(d as u32 + 1)
        .ok_or_else(|| GenError::InvalidParams("local table overflows usize".into()))?;
    let locals = (0..n)
        .map(|player| LocalTable {
            deps: ring_deps(n, d, player),
            table: (0..table_len).map(|_| rng.gen::<f64>()).collect(),
        })
        .collect();
    Ok(Game::graphical(n, m, locals)?)
}

fn graphical_random(p: GenParams, rng: &mut ChaCha8Rng) -> Result<Game, GenError> {
    let (n, m, d) = (p.players, p.actions, p.degree);
    if d >= n {
        return Err(GenError::InvalidParams(format!(
            "degree {d} needs at least {} players",
            d + 1
        )));
    }
    let table_len = m
        .checked_pow(d as u32 + 1)
        .ok_or_else(|| GenError::InvalidParams("local table overflows usize".into()))?;
    let mut locals = Vec::with_capacity(n);
    for player in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != player).collect();
        // Partial Fisher-Yates: the first d slots become the sample.
        for slot in 0..d {
            let pick = slot + rng.gen_range(0..others.len() - slot);
            others.swap(slot, pick);
        }
        let mut deps = others[..d].to_vec();
        deps.sort_unstable();
        locals.push(LocalTable {
            deps,
            table: (0..table_len).map(|_| rng.gen::<f64>()).collect(),
        });
    }
    Ok(Game::graphical(n, m, locals)?)
}

/// Random dense game re-centered so the uniform profile is an exact
/// equilibrium: `u'(a) = (u(a) - mean_of_own_action_vs_uniform + 1) / 2`.
/// The per-player map is positive affine with factor ½, so best responses
/// are unchanged and any ε statement about the original game becomes ε/2
/// here. Every action's payoff vs uniform opponents lands at ½: zero
/// regret, and the uniform profile is 1-small by construction.
fn uniform_equilibrium(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Game, GenError> {
    let mut tensors = random_tensors(n, m, rng)?;
    let size = tensors[0].len();
    let opponents = (size / m) as f64;
    for (player, tensor) in tensors.iter_mut().enumerate() {
        let own_stride = m.pow((n - 1 - player) as u32);
        let mut means = vec![0.0; m];
        for (idx, &v) in tensor.iter().enumerate() {
            means[(idx / own_stride) % m] += v;
        }
        for mean in &mut means {
            *mean /= opponents;
        }
        for (idx, v) in tensor.iter_mut().enumerate() {
            *v = (*v - means[(idx / own_stride) % m] + 1.0) / 2.0;
        }
    }
    Ok(Game::dense(n, m, tensors)?)
}

pub fn generate(kind: &str, params: &GenParams, seed: u64) -> Result<Game, GenError> {
    let p = *params;
    if p.players == 0 || p.actions == 0 {
        return Err(GenError::InvalidParams(
            "players and actions must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        "random-dense" => Ok(Game::dense(
            p.players,
            p.actions,
            random_tensors(p.players, p.actions, &mut rng)?,
        )?),
        "matching-pennies" => matching_pennies(),
        "coordination" => coordination(p.players, p.actions),
        "zero-sum-random" => zero_sum_random(p.actions, &mut rng),
        "graphical-ring" => graphical_ring(p, &mut rng),
        "graphical-random" => graphical_random(p, &mut rng),
        "uniform-equilibrium" => uniform_equilibrium(p.players, p.actions, &mut rng),
        other => Err(GenError::UnknownKind(other.to_string())),
    }
}
