//! Batch experiment runner: a JSON spec describing generators, tolerances,
//! and a k policy fans out into independent rows (one per game × ε), runs
//! across workers, and lands in a CSV that is identical between runs except
//! for the wall-clock column.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::k_graphical;
use crate::gen::{generate, GenParams, GENERATOR_KINDS};
use crate::game::{Game, GameError};
use crate::search::{
    count_ordered_equilibria, exhaustive_search, minimal_k, MinimalKOutcome, SearchConfig,
    SearchOutcome,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum KPolicy {
    /// Use this k everywhere.
    Fixed { k: usize },
    /// Per ε, use the analytic support bound for the game's shape.
    FromBounds,
    /// Scan k = 1, 2, … up to `k_max` for the smallest that works.
    Minimal { k_max: usize },
}

fn default_enumeration_budget() -> u64 {
    10_000_000
}

fn default_eval_budget() -> u64 {
    crate::game::DEFAULT_EVAL_BUDGET
}

fn default_count() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub generator: String,
    #[serde(default)]
    pub params: GenParams,
    pub epsilons: Vec<f64>,
    pub k_policy: KPolicy,
    pub seeds: Vec<u64>,
    #[serde(default = "default_enumeration_budget")]
    pub enumeration_budget: u64,
    #[serde(default = "default_eval_budget")]
    pub eval_budget: u64,
    /// Also report the exact ordered-equilibrium count per row (skipped
    /// silently when the enumeration would blow the budget).
    #[serde(default = "default_count")]
    pub count_equilibria: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

pub fn parse_experiment(bytes: &[u8]) -> Result<ExperimentSpec, crate::io::IoError> {
    let spec: ExperimentSpec = serde_json::from_slice(bytes)?;
    if !GENERATOR_KINDS.contains(&spec.generator.as_str()) {
        return Err(crate::io::IoError::Field(format!(
            "unknown generator \"{}\"",
            spec.generator
        )));
    }
    if let KPolicy::Fixed { k: 0 } | KPolicy::Minimal { k_max: 0 } = spec.k_policy {
        return Err(crate::io::IoError::Field("k policy needs k >= 1".into()));
    }
    Ok(spec)
}

pub const CSV_HEADER: &str = "seed,players,actions,degree,epsilon,k,k_bound,outcome,visited,witness_max_regret,ordered_count,wall_ms";

/// Round to 12 significant digits, then print the shortest decimal that
/// round-trips to the rounded value; magnitudes below 1e-5 keep exponent
/// form so cells never carry long runs of leading zeros.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let rounded: f64 = sci.parse().expect("exponent form parses");
    let e = sci.find('e').expect("exponent form has an e");
    let exp: i32 = sci[e + 1..].parse().expect("exponent parses");
    if exp < -5 {
        let mantissa = sci[..e].trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    } else {
        format!("{rounded}")
    }
}

/// Quote a CSV cell when it holds a comma, quote, or newline (RFC 4180).
pub fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone)]
struct Row {
    cells: Vec<String>,
    errored: bool,
}

fn declared_degree(game: &Game) -> usize {
    (0..game.players())
        .map(|i| game.declared_dependencies(i).len())
        .max()
        .unwrap_or(0)
}

fn run_row(spec: &ExperimentSpec, seed: u64, epsilon: f64) -> Row {
    let start = Instant::now();
    let mut cells = vec![seed.to_string()];
    let fail = |mut cells: Vec<String>, start: Instant, msg: String| {
        while cells.len() < 11 {
            cells.push(String::new());
        }
        cells[7] = format!("error: {msg}");
        cells.push(start.elapsed().as_millis().to_string());
        Row {
            cells,
            errored: true,
        }
    };

    let game = match generate(&spec.generator, &spec.params, seed) {
        Ok(g) => g,
        Err(e) => {
            cells.extend([
                spec.params.players.to_string(),
                spec.params.actions.to_string(),
            ]);
            return fail(cells, start, e.to_string());
        }
    };
    let n = game.players();
    let m = game.actions();
    let d = declared_degree(&game);
    cells.extend([n.to_string(), m.to_string(), d.to_string(), fmt_sig(epsilon)]);

    let k_bound = k_graphical(n, m, d, epsilon)
        .map(|k| k.to_string())
        .unwrap_or_default();

    let base = SearchConfig {
        epsilon,
        enumeration_budget: spec.enumeration_budget,
        eval_budget: spec.eval_budget,
        parallel: false,
        ..SearchConfig::default()
    };

    struct Outcome {
        k: Option<usize>,
        label: String,
        visited: u64,
        witness_regret: Option<f64>,
    }
    let searched: Result<Outcome, GameError> = match spec.k_policy {
        KPolicy::Fixed { k } => exhaustive_search(&game, &SearchConfig { k, ..base.clone() })
            .map(|r| Outcome {
                k: Some(k),
                label: r.outcome.as_str().to_string(),
                visited: r.visited,
                witness_regret: r.witness_regret,
            }),
        KPolicy::FromBounds => match k_graphical(n, m, d, epsilon) {
            Err(e) => Err(GameError::InvalidProfile(e.to_string())),
            Ok(k) => {
                let k = k as usize;
                exhaustive_search(&game, &SearchConfig { k, ..base.clone() }).map(|r| Outcome {
                    k: Some(k),
                    label: r.outcome.as_str().to_string(),
                    visited: r.visited,
                    witness_regret: r.witness_regret,
                })
            }
        },
        KPolicy::Minimal { k_max } => {
            minimal_k(&game, epsilon, k_max, &base).map(|out| match out {
                MinimalKOutcome::Found {
                    k,
                    witness_regret,
                    visited,
                    ..
                } => Outcome {
                    k: Some(k),
                    label: SearchOutcome::Found.as_str().to_string(),
                    visited,
                    witness_regret: Some(witness_regret),
                },
                MinimalKOutcome::NoneFound { .. } => Outcome {
                    k: None,
                    label: SearchOutcome::Exhausted.as_str().to_string(),
                    visited: 0,
                    witness_regret: None,
                },
                MinimalKOutcome::BudgetHit { k, visited } => Outcome {
                    k: Some(k),
                    label: SearchOutcome::BudgetHit.as_str().to_string(),
                    visited,
                    witness_regret: None,
                },
            })
        }
    };
    let outcome = match searched {
        Ok(o) => o,
        Err(e) => return fail(cells, start, e.to_string()),
    };

    let ordered_count = match (spec.count_equilibria, outcome.k) {
        (true, Some(k)) => {
            match count_ordered_equilibria(&game, &SearchConfig { k, ..base }) {
                Ok(c) => c.ordered_count.to_string(),
                Err(GameError::BudgetExceeded { .. }) => String::new(),
                Err(e) => return fail(cells, start, e.to_string()),
            }
        }
        _ => String::new(),
    };

    cells.extend([
        outcome.k.map(|k| k.to_string()).unwrap_or_default(),
        k_bound,
        outcome.label,
        outcome.visited.to_string(),
        outcome.witness_regret.map(fmt_sig).unwrap_or_default(),
        ordered_count,
        start.elapsed().as_millis().to_string(),
    ]);
    Row {
        cells,
        errored: false,
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub csv: String,
    pub rows: usize,
    pub row_errors: usize,
}

/// Run every (seed, ε) row, in parallel when the global pool allows, and
/// emit them in spec order.
pub fn run_experiment(spec: &ExperimentSpec) -> ExperimentReport {
    let jobs: Vec<(u64, f64)> = spec
        .seeds
        .iter()
        .flat_map(|&seed| spec.epsilons.iter().map(move |&e| (seed, e)))
        .collect();
    let rows: Vec<Row> = if rayon::current_num_threads() > 1 {
        jobs.par_iter()
            .map(|&(seed, e)| run_row(spec, seed, e))
            .collect()
    } else {
        jobs.iter().map(|&(seed, e)| run_row(spec, seed, e)).collect()
    };
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut row_errors = 0;
    for row in &rows {
        row_errors += usize::from(row.errored);
        let line: Vec<String> = row.cells.iter().map(|c| csv_cell(c)).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    ExperimentReport {
        csv,
        rows: rows.len(),
        row_errors,
    }
}
