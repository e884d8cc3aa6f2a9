//! `kuniform`: command-line access to the game library — generation,
//! regret checks, k-uniform searches and counts, analytic bounds, split-game
//! verification, concentration experiments, and batch CSV runs.
//!
//! Exit codes: 0 on success, 1 on any operational or row-level error, 2 on
//! usage errors (clap's default).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use kuniform::{
    bounds, empirical_concentration, exhaustive_search, generate, kuniform_regret,
    lift_mixed_profile, load_game, load_profile, minimal_k, parse_experiment, run_experiment,
    sample_hits, sample_search, save_game, serialize_game, ConcentrationQuery, Game, GenParams,
    LiftedGame, MinimalKOutcome, MixedProfile, ProfileFile, RegretReport, SearchConfig,
    DEFAULT_EVAL_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "kuniform",
    version,
    about = "Small-support approximate equilibria: search, counting, bounds, and experiments"
)]
struct Cli {
    /// Base RNG seed for anything randomized.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cap on profiles visited by enumerations.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,
    /// Cap on multilinear terms per payoff evaluation.
    #[arg(long, global = true, default_value_t = DEFAULT_EVAL_BUDGET)]
    eval_budget: u64,
    /// Regret tolerance ε.
    #[arg(long, global = true, default_value_t = 0.0)]
    epsilon: f64,
    /// Support parameter k.
    #[arg(long, global = true, default_value_t = 1)]
    k: usize,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a game instance and print or save its JSON.
    Gen(GenArgs),
    /// Report per-player regrets of a profile file against a game.
    Check(CheckArgs),
    /// Exhaustively scan k-uniform profiles for an ε-equilibrium.
    Search(GameOnly),
    /// Sample random k-uniform profiles for an ε-equilibrium.
    Sample(SampleArgs),
    /// Count ordered k-uniform ε-equilibria exactly.
    Count(GameOnly),
    /// Find the smallest k whose scan succeeds.
    MinimalK(MinimalKArgs),
    /// Print the analytic support/density/sample/concentration bounds.
    Bounds(BoundsArgs),
    /// Verify the population-split correspondence on a game.
    LiftCheck(LiftCheckArgs),
    /// Run an empirical payoff-concentration experiment.
    Concentration(ConcentrationArgs),
    /// Run a batch experiment spec and emit CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    /// One of: random-dense, matching-pennies, coordination,
    /// zero-sum-random, graphical-ring, graphical-random,
    /// uniform-equilibrium.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 2)]
    players: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 1)]
    degree: usize,
}

#[derive(Args)]
struct GameOnly {
    /// Path to a game JSON file.
    #[arg(long)]
    game: PathBuf,
    /// Split candidate scans across worker threads.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    game: PathBuf,
    /// Profile JSON file (mixed, k-uniform, or lifted).
    #[arg(long)]
    profile: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    game: PathBuf,
    /// Number of draws.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Report the fraction of qualifying draws instead of stopping at the
    /// first hit.
    #[arg(long)]
    density: bool,
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct MinimalKArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long, default_value_t = 8)]
    k_max: usize,
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    players: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    /// Dependency degree; defaults to players - 1 (dense).
    #[arg(long)]
    degree: Option<usize>,
    /// Small-probability constant for the density/sample bounds.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Payoff deviation for the concentration bound.
    #[arg(long)]
    delta: Option<f64>,
    /// Per-opponent sensitivity for the concentration bound.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct LiftCheckArgs {
    #[arg(long)]
    game: PathBuf,
    /// Check one specific lifted profile instead of sweeping all of them.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct ConcentrationArgs {
    #[arg(long)]
    game: PathBuf,
    /// Evaluate the game's k-member split instead of the game itself.
    #[arg(long)]
    lift: Option<usize>,
    #[arg(long, default_value_t = 0)]
    player: usize,
    #[arg(long, default_value_t = 0)]
    action: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Opponent mixed profile file; defaults to uniform play.
    #[arg(long)]
    opponents: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment spec JSON file.
    #[arg(long)]
    spec: PathBuf,
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    emit(out, &bytes)
}

fn load(path: &Path) -> Result<Game> {
    load_game(path).with_context(|| format!("loading game {}", path.display()))
}

fn regret_value(report: &RegretReport, epsilon: f64) -> serde_json::Value {
    json!({
        "players": report.players.iter().map(|p| json!({
            "current": p.current,
            "best_response": p.best_response,
            "regret": p.regret,
        })).collect::<Vec<_>>(),
        "max_regret": report.max_regret,
        "epsilon": epsilon,
        "is_equilibrium": report.is_epsilon_equilibrium(epsilon),
    })
}

fn witness_value(witness: &kuniform::KUniformProfile) -> serde_json::Value {
    // 1-based actions, matching profile files.
    json!({
        "k": witness.k(),
        "actions": witness.actions(),
        "multisets": witness
            .multisets()
            .iter()
            .map(|ms| ms.iter().map(|a| a + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn search_config(cli: &Cli, samples: u64, parallel: bool) -> SearchConfig {
    SearchConfig {
        k: cli.k,
        epsilon: cli.epsilon,
        max_samples: samples,
        seed: cli.seed,
        enumeration_budget: cli.budget,
        eval_budget: cli.eval_budget,
        parallel,
    }
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Gen(args) => {
            let params = GenParams {
                players: args.players,
                actions: args.actions,
                degree: args.degree,
            };
            let game = generate(&args.kind, &params, cli.seed)?;
            match &cli.out {
                Some(path) => save_game(path, &game)?,
                None => emit(&None, &serialize_game(&game))?,
            }
            Ok(0)
        }
        Cmd::Check(args) => {
            let game = load(&args.game)?;
            let profile = load_profile(&args.profile)
                .with_context(|| format!("loading profile {}", args.profile.display()))?;
            let (kind, report) = match profile {
                ProfileFile::Mixed(x) => (
                    "mixed",
                    kuniform::regret(&game, &x, cli.eval_budget)?,
                ),
                ProfileFile::KUniform(p) => (
                    "k-uniform",
                    kuniform_regret(&game, &p, cli.eval_budget)?,
                ),
                ProfileFile::Lifted { actions, profile } => {
                    if actions != game.actions() {
                        bail!(
                            "profile declares {actions} actions, game has {}",
                            game.actions()
                        );
                    }
                    let lifted = LiftedGame::new(game.clone(), profile.k())?;
                    ("lifted", lifted.pure_regret(&profile, cli.eval_budget)?)
                }
            };
            let mut value = regret_value(&report, cli.epsilon);
            value["profile_kind"] = json!(kind);
            emit_json(&cli.out, &value)?;
            Ok(0)
        }
        Cmd::Search(args) => {
            let game = load(&args.game)?;
            let r = exhaustive_search(&game, &search_config(cli, 0, args.parallel))?;
            emit_json(
                &cli.out,
                &json!({
                    "outcome": r.outcome.as_str(),
                    "visited": r.visited,
                    "witness": r.witness.as_ref().map(witness_value),
                    "witness_max_regret": r.witness_regret,
                }),
            )?;
            Ok(0)
        }
        Cmd::Sample(args) => {
            let game = load(&args.game)?;
            let cfg = search_config(cli, args.samples, args.parallel);
            if args.density {
                let hits = sample_hits(&game, &cfg, args.samples)?;
                emit_json(
                    &cli.out,
                    &json!({
                        "samples": args.samples,
                        "hits": hits,
                        "fraction": hits as f64 / args.samples.max(1) as f64,
                    }),
                )?;
            } else {
                let r = sample_search(&game, &cfg)?;
                emit_json(
                    &cli.out,
                    &json!({
                        "outcome": r.outcome.as_str(),
                        "visited": r.visited,
                        "witness": r.witness.as_ref().map(witness_value),
                        "witness_max_regret": r.witness_regret,
                    }),
                )?;
            }
            Ok(0)
        }
        Cmd::Count(args) => {
            let game = load(&args.game)?;
            let r = kuniform::count_ordered_equilibria(
                &game,
                &search_config(cli, 0, args.parallel),
            )?;
            emit_json(
                &cli.out,
                &json!({
                    "ordered_count": r.ordered_count.to_string(),
                    "total_ordered": r.total_ordered.to_string(),
                    "canonical_visited": r.canonical_visited,
                }),
            )?;
            Ok(0)
        }
        Cmd::MinimalK(args) => {
            let game = load(&args.game)?;
            let mut base = search_config(cli, 0, args.parallel);
            base.k = 1;
            let out = minimal_k(&game, cli.epsilon, args.k_max, &base)?;
            let value = match out {
                MinimalKOutcome::Found {
                    k,
                    witness,
                    witness_regret,
                    visited,
                } => json!({
                    "outcome": "found",
                    "k": k,
                    "visited": visited,
                    "witness": witness_value(&witness),
                    "witness_max_regret": witness_regret,
                }),
                MinimalKOutcome::NoneFound { k_max } => json!({
                    "outcome": "exhausted",
                    "k_max": k_max,
                }),
                MinimalKOutcome::BudgetHit { k, visited } => json!({
                    "outcome": "budget-hit",
                    "k": k,
                    "visited": visited,
                }),
            };
            emit_json(&cli.out, &value)?;
            Ok(0)
        }
        Cmd::Bounds(args) => {
            let n = args.players;
            let m = args.actions;
            let d = args.degree.unwrap_or(n.saturating_sub(1));
            let mut value = json!({
                "players": n,
                "actions": m,
                "degree": d,
                "epsilon": cli.epsilon,
            });
            if let Ok(k) = bounds::k_general(n, m, cli.epsilon) {
                value["k_general"] = json!(k);
            }
            if let Ok(k) = bounds::k_graphical(n, m, d, cli.epsilon) {
                value["k_graphical"] = json!(k);
            }
            if let Ok(db) = bounds::theorem2_lower_bound(n, m, args.c, cli.epsilon, cli.k as u64)
            {
                value["density"] = json!({
                    "log2_count": db.log2_count,
                    "k": cli.k,
                    "theorem_k": db.theorem_k,
                    "advisory": db.advisory,
                });
            }
            if let Ok(s) = bounds::corollary2_samples(n, m, args.c, cli.epsilon) {
                value["log2_samples"] = json!(s);
            }
            if let (Some(delta), Some(lambda)) = (args.delta, args.lambda) {
                if let Ok(b) = bounds::concentration_bound(delta, d, lambda) {
                    value["concentration"] = json!({
                        "delta": delta,
                        "lambda": lambda,
                        "bound": b,
                    });
                }
            }
            emit_json(&cli.out, &value)?;
            Ok(0)
        }
        Cmd::LiftCheck(args) => {
            let game = load(&args.game)?;
            let k = cli.k;
            let lifted = LiftedGame::new(game.clone(), k)?;
            if let Some(path) = &args.profile {
                let profile = match load_profile(path)? {
                    ProfileFile::Lifted { profile, .. } => profile,
                    ProfileFile::KUniform(p) => kuniform::ordered_representative(&p),
                    ProfileFile::Mixed(_) => {
                        bail!("lift-check needs a lifted or k-uniform profile")
                    }
                };
                let (lifted_ok, base_ok) = kuniform::verify_correspondence(
                    &game,
                    profile.k(),
                    cli.epsilon,
                    &profile,
                    cli.eval_budget,
                )?;
                emit_json(
                    &cli.out,
                    &json!({
                        "epsilon": cli.epsilon,
                        "split_equilibrium": lifted_ok,
                        "aggregate_equilibrium": base_ok,
                    }),
                )?;
                return Ok(0);
            }
            // Full sweep over all m^(nk) split profiles.
            let n = game.players();
            let m = game.actions();
            let digits = n * k;
            let total = (m as u128).saturating_pow(digits as u32);
            if total > cli.budget as u128 {
                bail!("sweep needs {total} profiles, budget is {}", cli.budget);
            }
            let mut forward_violations = 0u64;
            let mut converse_violations = 0u64;
            let mut split_equilibria = 0u64;
            let mut aggregate_equilibria = 0u64;
            for idx in 0..total as usize {
                let mut rem = idx;
                let mut digit = vec![0usize; digits];
                for p in (0..digits).rev() {
                    digit[p] = rem % m;
                    rem /= m;
                }
                let profile = kuniform::LiftedPureProfile::new(
                    digit.chunks(k).map(<[usize]>::to_vec).collect(),
                )?;
                let (lifted_ok, base_ok) = kuniform::verify_correspondence(
                    &game,
                    k,
                    cli.epsilon,
                    &profile,
                    cli.eval_budget,
                )?;
                split_equilibria += u64::from(lifted_ok);
                aggregate_equilibria += u64::from(base_ok);
                forward_violations += u64::from(lifted_ok && !base_ok);
                converse_violations += u64::from(base_ok && !lifted_ok);
            }
            let measured = lifted
                .materialize(cli.eval_budget)
                .and_then(|dense| kuniform::lipschitz_constant(&dense, cli.eval_budget))
                .ok();
            emit_json(
                &cli.out,
                &json!({
                    "epsilon": cli.epsilon,
                    "k": k,
                    "profiles": total as u64,
                    "split_equilibria": split_equilibria,
                    "aggregate_equilibria": aggregate_equilibria,
                    "forward_violations": forward_violations,
                    "converse_violations": converse_violations,
                    "sensitivity_bound": lifted.lipschitz_bound(),
                    "measured_sensitivity": measured,
                }),
            )?;
            Ok(0)
        }
        Cmd::Concentration(args) => {
            let game = load(&args.game)?;
            let opponents = match &args.opponents {
                Some(path) => match load_profile(path)? {
                    ProfileFile::Mixed(x) => x,
                    _ => bail!("opponents file must hold a mixed profile"),
                },
                None => MixedProfile::uniform(game.players(), game.actions()),
            };
            let value = match args.lift {
                Some(k) => {
                    let lifted = LiftedGame::new(game.clone(), k)?;
                    let opponents = if opponents.players() == lifted.players() {
                        opponents
                    } else {
                        lift_mixed_profile(&opponents, k)
                    };
                    let (population, _) = lifted.split(args.player);
                    let q = ConcentrationQuery {
                        player: args.player,
                        action: args.action,
                        opponents,
                        delta: args.delta,
                        trials: args.trials,
                        seed: cli.seed,
                        degree: lifted.degree_for(population),
                        lambda: lifted.lipschitz_bound(),
                    };
                    let r = empirical_concentration(&lifted, &q, cli.eval_budget)?;
                    json!({
                        "frequency": r.frequency,
                        "bound": r.bound,
                        "sigma": r.sigma,
                        "reference": r.reference,
                        "trials": r.trials,
                        "degree": q.degree,
                        "lambda": q.lambda,
                    })
                }
                None => {
                    let degree = game.declared_dependencies(args.player).len();
                    let lambda = kuniform::lipschitz_constant(&game, cli.eval_budget)?;
                    let q = ConcentrationQuery {
                        player: args.player,
                        action: args.action,
                        opponents,
                        delta: args.delta,
                        trials: args.trials,
                        seed: cli.seed,
                        degree,
                        lambda,
                    };
                    let r = empirical_concentration(&game, &q, cli.eval_budget)?;
                    json!({
                        "frequency": r.frequency,
                        "bound": r.bound,
                        "sigma": r.sigma,
                        "reference": r.reference,
                        "trials": r.trials,
                        "degree": degree,
                        "lambda": lambda,
                    })
                }
            };
            emit_json(&cli.out, &value)?;
            Ok(0)
        }
        Cmd::Experiment(args) => {
            let bytes = std::fs::read(&args.spec)
                .with_context(|| format!("reading spec {}", args.spec.display()))?;
            let spec = parse_experiment(&bytes)?;
            let report = run_experiment(&spec);
            let target = cli
                .out
                .clone()
                .or_else(|| spec.output.as_ref().map(PathBuf::from));
            emit(&target, report.csv.as_bytes())?;
            Ok(if report.row_errors > 0 { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore "already initialized": only possible if a future change
        // touches rayon before this point.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
