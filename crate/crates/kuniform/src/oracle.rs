//! Slow, independent reference implementations.
//!
//! Everything here recomputes quantities from first principles — full
//! products over the entire profile space, plain recursion, no shared
//! helpers with the fast paths — so the two sides can be compared in tests
//! without a common bug hiding in both. Keep it that way: do not "optimize"
//! these by delegating to the production code.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::concentration_bound;
use crate::game::{Game, GameError, KUniformProfile, MixedProfile, PayoffFn, VALUE_TOL};

fn profile_space(game: &Game) -> u128 {
    (game.actions() as u128).pow(game.players() as u32)
}

fn check_naive_budget(terms: u128, budget: u64) -> Result<(), GameError> {
    if terms > budget as u128 {
        return Err(GameError::BudgetExceeded {
            needed: terms,
            budget,
        });
    }
    Ok(())
}

/// Expected payoff by brute force: walk every pure profile and weight it by
/// the product of the players' probabilities.
pub fn naive_value(
    game: &Game,
    player: usize,
    x: &MixedProfile,
    budget: u64,
) -> Result<f64, GameError> {
    if player >= game.players() {
        return Err(GameError::PlayerIndex {
            player,
            players: game.players(),
        });
    }
    if x.players() != game.players() || x.actions() != game.actions() {
        return Err(GameError::Dimension(
            "mixed profile shape does not match the game".into(),
        ));
    }
    check_naive_budget(profile_space(game), budget)?;
    let n = game.players();
    let m = game.actions();
    let mut profile = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut prob = 1.0;
        for (j, &a) in profile.iter().enumerate() {
            prob *= x.strategy(j)[a];
        }
        if prob != 0.0 {
            total += prob * game.payoff(player, &profile);
        }
        // odometer, last player fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            profile[pos] += 1;
            if profile[pos] < m {
                break;
            }
            profile[pos] = 0;
        }
    }
}

/// Per-player regrets by brute force: every deviation payoff is its own full
/// product over the profile space.
pub fn naive_regret(game: &Game, x: &MixedProfile, budget: u64) -> Result<Vec<f64>, GameError> {
    let n = game.players();
    let m = game.actions();
    let terms = profile_space(game)
        .saturating_mul((n as u128) * (m as u128 + 1));
    check_naive_budget(terms, budget)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let current = naive_value(game, i, x, budget)?;
        let mut best = f64::NEG_INFINITY;
        for b in 0..m {
            let mut rows = x.strategies().to_vec();
            rows[i] = vec![0.0; m];
            rows[i][b] = 1.0;
            let deviated = MixedProfile::new(rows)?;
            best = best.max(naive_value(game, i, &deviated, budget)?);
        }
        out.push((best - current).max(0.0));
    }
    Ok(out)
}

/// All pure ε-equilibria in lexicographic order, found by checking every
/// unilateral deviation at every pure profile.
pub fn brute_force_pure_equilibria(
    game: &Game,
    epsilon: f64,
    budget: u64,
) -> Result<Vec<Vec<usize>>, GameError> {
    let n = game.players();
    let m = game.actions();
    let terms = profile_space(game).saturating_mul((n * m) as u128);
    check_naive_budget(terms, budget)?;
    let bar = epsilon + crate::game::REGRET_TOL;
    let mut profile = vec![0usize; n];
    let mut hits = Vec::new();
    loop {
        let mut ok = true;
        'players: for i in 0..n {
            let own = game.payoff(i, &profile);
            let keep = profile[i];
            for b in 0..m {
                profile[i] = b;
                let dev = game.payoff(i, &profile);
                if dev - own > bar {
                    profile[i] = keep;
                    ok = false;
                    break 'players;
                }
            }
            profile[i] = keep;
        }
        if ok {
            hits.push(profile.clone());
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(hits);
            }
            pos -= 1;
            profile[pos] += 1;
            if profile[pos] < m {
                break;
            }
            profile[pos] = 0;
        }
    }
}

/// Every way to split `k` across `m` actions, in lexicographic order.
fn count_vectors(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=k {
            prefix.push(c);
            rec(m - 1, k - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, &mut Vec::new(), &mut out);
    out
}

fn counts_to_multiset(counts: &[usize]) -> Vec<usize> {
    let mut ms = Vec::new();
    for (a, &c) in counts.iter().enumerate() {
        ms.extend(std::iter::repeat(a).take(c));
    }
    ms
}

#[derive(Debug, Clone)]
pub struct GridScan {
    pub best: KUniformProfile,
    pub min_max_regret: f64,
}

/// Scan the full grid of denominator-k aggregate profiles with brute-force
/// regrets, returning the first minimizer of the max regret.
pub fn grid_min_regret(game: &Game, k: usize, budget: u64) -> Result<GridScan, GameError> {
    if k == 0 {
        return Err(GameError::InvalidProfile("k must be positive".into()));
    }
    let n = game.players();
    let m = game.actions();
    let per_player = count_vectors(m, k);
    let combos = (per_player.len() as u128).pow(n as u32);
    check_naive_budget(combos, budget)?;
    let mut pick = vec![0usize; n];
    let mut best: Option<(f64, KUniformProfile)> = None;
    loop {
        let multisets: Vec<Vec<usize>> = pick
            .iter()
            .map(|&idx| counts_to_multiset(&per_player[idx]))
            .collect();
        let profile = KUniformProfile::new(m, multisets)?;
        let regrets = naive_regret(game, &profile.aggregate(), budget)?;
        let max_regret = regrets.into_iter().fold(0.0, f64::max);
        if best.as_ref().map_or(true, |(r, _)| max_regret < *r) {
            best = Some((max_regret, profile));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                let (min_max_regret, best) = best.expect("grid is never empty");
                return Ok(GridScan {
                    best,
                    min_max_regret,
                });
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < per_player.len() {
                break;
            }
            pick[pos] = 0;
        }
    }
}

/// Ordered ε-equilibrium count by literal enumeration of all `m^(kn)`
/// ordered action tuples, with brute-force regret per distinct aggregate.
pub fn direct_ordered_equilibrium_count(
    game: &Game,
    k: usize,
    epsilon: f64,
    budget: u64,
) -> Result<u128, GameError> {
    if k == 0 {
        return Err(GameError::InvalidProfile("k must be positive".into()));
    }
    let n = game.players();
    let m = game.actions();
    let digits = n * k;
    let tuples = (m as u128).pow(digits as u32);
    check_naive_budget(tuples, budget)?;
    let bar = epsilon + crate::game::REGRET_TOL;
    let mut digit = vec![0usize; digits];
    let mut verdicts: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut count: u128 = 0;
    loop {
        let mut key = Vec::with_capacity(n * m);
        for i in 0..n {
            let mut c = vec![0usize; m];
            for &a in &digit[i * k..(i + 1) * k] {
                c[a] += 1;
            }
            key.extend(c);
        }
        let hit = match verdicts.get(&key) {
            Some(&v) => v,
            None => {
                let strategies: Vec<Vec<f64>> = key
                    .chunks(m)
                    .map(|c| c.iter().map(|&v| v as f64 / k as f64).collect())
                    .collect();
                let x = MixedProfile::new(strategies)?;
                let regrets = naive_regret(game, &x, budget)?;
                let v = regrets.into_iter().fold(0.0, f64::max) <= bar;
                verdicts.insert(key, v);
                v
            }
        };
        count += u128::from(hit);
        let mut pos = digits;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            digit[pos] += 1;
            if digit[pos] < m {
                break;
            }
            digit[pos] = 0;
        }
    }
}

/// One empirical concentration experiment: how often does the payoff of a
/// fixed action against *sampled* pure opponent play stay within `delta` of
/// its expectation?
#[derive(Debug, Clone)]
pub struct ConcentrationQuery {
    pub player: usize,
    pub action: usize,
    /// Opponent mixed play; the player's own row is ignored.
    pub opponents: MixedProfile,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    /// Dependency count to feed the analytic bound.
    pub degree: usize,
    /// Per-opponent payoff sensitivity to feed the analytic bound.
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    /// Fraction of trials with `|sampled - reference| <= delta`.
    pub frequency: f64,
    /// Analytic lower bound on that probability, when applicable. May be
    /// negative (vacuous).
    pub bound: Option<f64>,
    /// Binomial standard error `sqrt(0.25 / trials)` of the frequency.
    pub sigma: f64,
    /// Expected payoff of the fixed action against `opponents`.
    pub reference: f64,
    pub trials: u64,
}

const CONCENTRATION_CHUNK: u64 = 4096;

fn draw_action(row: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let r: f64 = rng.gen_range(0.0..1.0);
    let mut acc = 0.0;
    for (a, &p) in row.iter().enumerate() {
        acc += p;
        if r < acc {
            return a;
        }
    }
    row.len() - 1
}

/// Run the experiment. Trials are grouped into fixed-size chunks, each with
/// its own derived random stream, so the outcome is identical at any thread
/// count.
pub fn empirical_concentration<P: PayoffFn + Sync>(
    payoffs: &P,
    query: &ConcentrationQuery,
    eval_budget: u64,
) -> Result<ConcentrationReport, GameError> {
    let n = payoffs.players();
    let m = payoffs.actions();
    if query.player >= n {
        return Err(GameError::PlayerIndex {
            player: query.player,
            players: n,
        });
    }
    if query.action >= m {
        return Err(GameError::InvalidProfile(format!(
            "action {} out of range for {m} actions",
            query.action
        )));
    }
    if query.opponents.players() != n || query.opponents.actions() != m {
        return Err(GameError::Dimension(
            "opponent profile shape does not match the payoff function".into(),
        ));
    }
    if query.trials == 0 {
        return Err(GameError::InvalidProfile("trials must be positive".into()));
    }
    let reference =
        payoffs.payoff_vs_mixed(query.player, query.action, &query.opponents, eval_budget)?;
    let bar = query.delta + VALUE_TOL;

    let chunks = query.trials.div_ceil(CONCENTRATION_CHUNK);
    let run_chunk = |chunk: u64| -> u64 {
        let lo = chunk * CONCENTRATION_CHUNK;
        let hi = (lo + CONCENTRATION_CHUNK).min(query.trials);
        let mut rng = ChaCha8Rng::seed_from_u64(crate::search::derive_seed(query.seed, chunk));
        let mut profile = vec![0usize; n];
        let mut hits = 0u64;
        for _ in lo..hi {
            for j in 0..n {
                profile[j] = if j == query.player {
                    query.action
                } else {
                    draw_action(query.opponents.strategy(j), &mut rng)
                };
            }
            let sampled = payoffs.pure_payoff(query.player, &profile);
            hits += u64::from((sampled - reference).abs() <= bar);
        }
        hits
    };
    let hits: u64 = if rayon::current_num_threads() > 1 && chunks > 1 {
        (0..chunks).into_par_iter().map(run_chunk).sum()
    } else {
        (0..chunks).map(run_chunk).sum()
    };

    Ok(ConcentrationReport {
        frequency: hits as f64 / query.trials as f64,
        bound: concentration_bound(query.delta, query.degree, query.lambda).ok(),
        sigma: (0.25 / query.trials as f64).sqrt(),
        reference,
        trials: query.trials,
    })
}
