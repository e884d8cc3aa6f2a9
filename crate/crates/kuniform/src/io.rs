//! JSON game and profile files.
//!
//! Canonical form (what `serialize_game` emits and fixtures are stored in):
//! a single `actions` integer, dense payoffs as nested row-major arrays
//! (player 0's action outermost), graphical payoffs as `{deps, table}` with
//! flat tables, 1-based player indices in `deps`, two-space pretty printing,
//! trailing newline. The parser is more liberal: flat payoff arrays,
//! per-player `actions` lists (padded by clamping to each axis's last real
//! action), and an affine `"scale": [lo, hi]` mapping declared-range payoffs
//! onto `[0, 1]`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::game::{Form, Game, GameError, KUniformProfile, LocalTable, MixedProfile};
use crate::lift::LiftedPureProfile;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("payoff out of range for player {player} at entry {index}: {value} (declare \"scale\" for non-unit ranges)")]
    Range {
        player: usize,
        index: usize,
        value: f64,
    },
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("invalid field: {0}")]
    Field(String),
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("i/o failure: {0}")]
    File(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ActionsField {
    Uniform(usize),
    PerPlayer(Vec<usize>),
}

#[derive(Debug, Serialize, Deserialize)]
struct GameFileRaw {
    players: usize,
    actions: ActionsField,
    form: String,
    payoffs: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

#[derive(Debug, Deserialize)]
struct LocalRaw {
    deps: Vec<usize>,
    table: Value,
}

/// Flatten a payoff array of declared shape `dims` (nested row-major or
/// already flat) into row-major order.
fn flatten_payoffs(player: usize, value: &Value, dims: &[usize]) -> Result<Vec<f64>, IoError> {
    fn walk(
        player: usize,
        value: &Value,
        dims: &[usize],
        out: &mut Vec<f64>,
    ) -> Result<(), IoError> {
        match (value, dims) {
            (Value::Array(items), [head, rest @ ..]) if !rest.is_empty() => {
                if items.len() != *head {
                    return Err(IoError::Dimension(format!(
                        "player {player}: expected {head} entries along an axis, found {}",
                        items.len()
                    )));
                }
                for item in items {
                    walk(player, item, rest, out)?;
                }
                Ok(())
            }
            (Value::Array(items), [head]) => {
                if items.len() != *head {
                    return Err(IoError::Dimension(format!(
                        "player {player}: expected {head} entries along the last axis, found {}",
                        items.len()
                    )));
                }
                for item in items {
                    let v = item.as_f64().ok_or_else(|| {
                        IoError::Field(format!("player {player}: payoff entries must be numbers"))
                    })?;
                    out.push(v);
                }
                Ok(())
            }
            _ => Err(IoError::Field(format!(
                "player {player}: payoffs must be arrays"
            ))),
        }
    }

    let want: usize = dims.iter().product();
    // A flat array of the full length is accepted whenever it is not also a
    // valid first axis (ambiguity only arises for 1-dimensional tables,
    // where the two readings agree).
    if let Value::Array(items) = value {
        let flat = items.iter().all(|v| v.is_number());
        if flat {
            if items.len() != want {
                return Err(IoError::Dimension(format!(
                    "player {player}: flat payoff array has {} entries, expected {want}",
                    items.len()
                )));
            }
            let mut out = Vec::with_capacity(want);
            for item in items {
                out.push(item.as_f64().expect("checked numeric"));
            }
            return Ok(out);
        }
    }
    let mut out = Vec::with_capacity(want);
    walk(player, value, dims, &mut out)?;
    Ok(out)
}

fn apply_scale(
    player: usize,
    values: &mut [f64],
    scale: Option<[f64; 2]>,
) -> Result<(), IoError> {
    match scale {
        None => {
            for (index, &v) in values.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) || v.is_nan() {
                    return Err(IoError::Range {
                        player,
                        index,
                        value: v,
                    });
                }
            }
        }
        Some([lo, hi]) => {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(IoError::Field(format!(
                    "scale [{lo}, {hi}] must be a finite increasing pair"
                )));
            }
            for (index, v) in values.iter_mut().enumerate() {
                if !(*v >= lo && *v <= hi) {
                    return Err(IoError::Range {
                        player,
                        index,
                        value: *v,
                    });
                }
                *v = (*v - lo) / (hi - lo);
            }
        }
    }
    Ok(())
}

/// Pad a row-major table of shape `dims` up to shape `m^dims.len()` by
/// clamping each padded index to the axis's last real action, so padded
/// actions behave exactly like the highest original one.
fn pad_axes(values: &[f64], dims: &[usize], m: usize) -> Vec<f64> {
    if dims.iter().all(|&d| d == m) {
        return values.to_vec();
    }
    let rank = dims.len();
    let total = m.pow(rank as u32);
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; rank];
    for _ in 0..total {
        let mut src = 0usize;
        for (axis, &a) in idx.iter().enumerate() {
            src = src * dims[axis] + a.min(dims[axis] - 1);
        }
        out.push(values[src]);
        for pos in (0..rank).rev() {
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
    out
}

pub fn parse_game(bytes: &[u8]) -> Result<Game, IoError> {
    let raw: GameFileRaw = serde_json::from_slice(bytes)?;
    let n = raw.players;
    if n == 0 {
        return Err(IoError::Field("players must be positive".into()));
    }
    let per_player: Vec<usize> = match &raw.actions {
        ActionsField::Uniform(m) => vec![*m; n],
        ActionsField::PerPlayer(v) => {
            if v.len() != n {
                return Err(IoError::Dimension(format!(
                    "actions lists {} players, document declares {n}",
                    v.len()
                )));
            }
            v.clone()
        }
    };
    if per_player.iter().any(|&m| m == 0) {
        return Err(IoError::Field("every action count must be positive".into()));
    }
    let m = *per_player.iter().max().expect("players > 0");

    let mut game = match raw.form.as_str() {
        "dense" => {
            let rows = raw
                .payoffs
                .as_array()
                .ok_or_else(|| IoError::Field("dense payoffs must be an array per player".into()))?;
            if rows.len() != n {
                return Err(IoError::Dimension(format!(
                    "payoffs list {} players, document declares {n}",
                    rows.len()
                )));
            }
            let mut tensors = Vec::with_capacity(n);
            for (player, row) in rows.iter().enumerate() {
                let mut flat = flatten_payoffs(player, row, &per_player)?;
                apply_scale(player, &mut flat, raw.scale)?;
                tensors.push(pad_axes(&flat, &per_player, m));
            }
            Game::dense(n, m, tensors)?
        }
        "graphical" => {
            let rows = raw
                .payoffs
                .as_array()
                .ok_or_else(|| {
                    IoError::Field("graphical payoffs must be an array per player".into())
                })?;
            if rows.len() != n {
                return Err(IoError::Dimension(format!(
                    "payoffs list {} players, document declares {n}",
                    rows.len()
                )));
            }
            let mut locals = Vec::with_capacity(n);
            for (player, row) in rows.iter().enumerate() {
                let local: LocalRaw = serde_json::from_value(row.clone())?;
                let mut deps = Vec::with_capacity(local.deps.len());
                for &dep in &local.deps {
                    if dep == 0 || dep > n {
                        return Err(IoError::Field(format!(
                            "player {}: dependency {dep} outside 1..={n}",
                            player + 1
                        )));
                    }
                    deps.push(dep - 1);
                }
                let mut dims = vec![per_player[player]];
                dims.extend(deps.iter().map(|&d| per_player[d]));
                let mut flat = flatten_payoffs(player, &local.table, &dims)?;
                apply_scale(player, &mut flat, raw.scale)?;
                let table = pad_axes(&flat, &dims, m);
                locals.push(LocalTable { deps, table });
            }
            Game::graphical(n, m, locals)?
        }
        other => {
            return Err(IoError::Field(format!(
                "form must be \"dense\" or \"graphical\", got \"{other}\""
            )))
        }
    };
    game.meta = raw.meta;
    Ok(game)
}

fn nest(values: &[f64], m: usize, rank: usize) -> Value {
    if rank == 1 {
        return Value::Array(values.iter().map(|&v| json!(v)).collect());
    }
    let block = values.len() / m;
    Value::Array(
        values
            .chunks(block)
            .map(|chunk| nest(chunk, m, rank - 1))
            .collect(),
    )
}

/// Canonical bytes: pretty-printed JSON plus a trailing newline. Payoffs
/// already in `[0, 1]` survive a round trip bit-exact.
pub fn serialize_game(game: &Game) -> Vec<u8> {
    let n = game.players();
    let m = game.actions();
    let payoffs = match game.form() {
        Form::Dense(tensors) => Value::Array(tensors.iter().map(|t| nest(t, m, n)).collect()),
        Form::Graphical(locals) => Value::Array(
            locals
                .iter()
                .map(|local| {
                    json!({
                        "deps": local.deps.iter().map(|d| d + 1).collect::<Vec<_>>(),
                        "table": local.table,
                    })
                })
                .collect(),
        ),
    };
    let raw = GameFileRaw {
        players: n,
        actions: ActionsField::Uniform(m),
        form: if game.is_dense() { "dense" } else { "graphical" }.into(),
        payoffs,
        scale: None,
        meta: game.meta.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&raw).expect("game files always serialize");
    bytes.push(b'\n');
    bytes
}

pub fn load_game(path: &Path) -> Result<Game, IoError> {
    parse_game(&std::fs::read(path)?)
}

pub fn save_game(path: &Path, game: &Game) -> Result<(), IoError> {
    Ok(std::fs::write(path, serialize_game(game))?)
}

/// A strategy-profile document: fully mixed, k-uniform multisets, or an
/// ordered pure profile of a population-split game. Actions in files are
/// 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFile {
    Mixed(MixedProfile),
    KUniform(KUniformProfile),
    Lifted {
        actions: usize,
        profile: LiftedPureProfile,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileFileRaw {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    actions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strategies: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multisets: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    populations: Option<Vec<Vec<usize>>>,
}

fn one_based(
    rows: &[Vec<usize>],
    actions: usize,
    what: &str,
) -> Result<Vec<Vec<usize>>, IoError> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|&a| {
                    if a == 0 || a > actions {
                        Err(IoError::Profile(format!(
                            "{what} action {a} outside 1..={actions}"
                        )))
                    } else {
                        Ok(a - 1)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn parse_profile(bytes: &[u8]) -> Result<ProfileFile, IoError> {
    let raw: ProfileFileRaw = serde_json::from_slice(bytes)?;
    match raw.kind.as_str() {
        "mixed" => {
            let strategies = raw
                .strategies
                .ok_or_else(|| IoError::Field("mixed profile requires \"strategies\"".into()))?;
            let profile = MixedProfile::new(strategies)
                .map_err(|e| IoError::Profile(e.to_string()))?;
            Ok(ProfileFile::Mixed(profile))
        }
        "k-uniform" => {
            let actions = raw
                .actions
                .ok_or_else(|| IoError::Field("k-uniform profile requires \"actions\"".into()))?;
            let multisets = raw
                .multisets
                .ok_or_else(|| IoError::Field("k-uniform profile requires \"multisets\"".into()))?;
            if let Some(k) = raw.k {
                if multisets.iter().any(|ms| ms.len() != k) {
                    return Err(IoError::Dimension(format!(
                        "a multiset's size differs from the declared k={k}"
                    )));
                }
            }
            let zero_based = one_based(&multisets, actions, "multiset")?;
            let profile = KUniformProfile::new(actions, zero_based)
                .map_err(|e| IoError::Profile(e.to_string()))?;
            Ok(ProfileFile::KUniform(profile))
        }
        "lifted" => {
            let actions = raw
                .actions
                .ok_or_else(|| IoError::Field("lifted profile requires \"actions\"".into()))?;
            let populations = raw
                .populations
                .ok_or_else(|| IoError::Field("lifted profile requires \"populations\"".into()))?;
            if let Some(k) = raw.k {
                if populations.iter().any(|p| p.len() != k) {
                    return Err(IoError::Dimension(format!(
                        "a population's size differs from the declared k={k}"
                    )));
                }
            }
            let zero_based = one_based(&populations, actions, "population")?;
            let profile = LiftedPureProfile::new(zero_based)
                .map_err(|e| IoError::Profile(e.to_string()))?;
            Ok(ProfileFile::Lifted { actions, profile })
        }
        other => Err(IoError::Field(format!(
            "kind must be \"mixed\", \"k-uniform\", or \"lifted\", got \"{other}\""
        ))),
    }
}

pub fn serialize_profile(profile: &ProfileFile) -> Vec<u8> {
    let raw = match profile {
        ProfileFile::Mixed(x) => ProfileFileRaw {
            kind: "mixed".into(),
            k: None,
            actions: None,
            strategies: Some(x.strategies().to_vec()),
            multisets: None,
            populations: None,
        },
        ProfileFile::KUniform(p) => ProfileFileRaw {
            kind: "k-uniform".into(),
            k: Some(p.k()),
            actions: Some(p.actions()),
            strategies: None,
            multisets: Some(
                p.multisets()
                    .iter()
                    .map(|ms| ms.iter().map(|a| a + 1).collect())
                    .collect(),
            ),
            populations: None,
        },
        ProfileFile::Lifted { actions, profile } => ProfileFileRaw {
            kind: "lifted".into(),
            k: Some(profile.k()),
            actions: Some(*actions),
            strategies: None,
            multisets: None,
            populations: Some(
                profile
                    .populations()
                    .iter()
                    .map(|p| p.iter().map(|a| a + 1).collect())
                    .collect(),
            ),
        },
    };
    let mut bytes = serde_json::to_vec_pretty(&raw).expect("profile files always serialize");
    bytes.push(b'\n');
    bytes
}

pub fn load_profile(path: &Path) -> Result<ProfileFile, IoError> {
    parse_profile(&std::fs::read(path)?)
}

pub fn save_profile(path: &Path, profile: &ProfileFile) -> Result<(), IoError> {
    Ok(std::fs::write(path, serialize_profile(profile))?)
}

#[cfg(test)]
mod tests;
