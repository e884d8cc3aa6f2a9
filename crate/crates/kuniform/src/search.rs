//! Search and counting over k-uniform profiles.
//!
//! Candidates are canonical multisets enumerated lexicographically with the
//! last player fastest. The last player's deviation table only depends on
//! the other players' aggregates, so it is cached per enumeration prefix and
//! candidates are rejected against it before anything else is evaluated —
//! that check is the hot path of every scan here.
//!
//! Parallel scans partition by the first player's multiset and reduce with
//! ordered find-first, so the witness and the visited count are identical to
//! the sequential scan for any worker count.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::game::{
    br_table_supports, kuniform_regret, Game, GameError, KUniformProfile, MixedProfile,
    DEFAULT_EVAL_BUDGET, REGRET_TOL, VALUE_TOL,
};

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub k: usize,
    pub epsilon: f64,
    /// Sampling only: number of draws before giving up.
    pub max_samples: u64,
    /// Sampling only: base seed; each sample uses its own derived stream.
    pub seed: u64,
    /// Cap on canonical profiles visited by an enumeration.
    pub enumeration_budget: u64,
    /// Cap on multilinear terms per payoff evaluation.
    pub eval_budget: u64,
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            k: 1,
            epsilon: 0.0,
            max_samples: 1_000,
            seed: 0,
            enumeration_budget: 10_000_000,
            eval_budget: DEFAULT_EVAL_BUDGET,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    Found,
    Exhausted,
    BudgetHit,
}

impl SearchOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchOutcome::Found => "found",
            SearchOutcome::Exhausted => "exhausted",
            SearchOutcome::BudgetHit => "budget-hit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub witness: Option<KUniformProfile>,
    /// Max regret of the witness, when one was found.
    pub witness_regret: Option<f64>,
    /// Profiles checked (enumeration order for exhaustive, draws for
    /// sampling).
    pub visited: u64,
}

/// Number of size-k multisets over m actions, `C(m+k-1, k)`, saturating.
pub fn multiset_count(m: usize, k: usize) -> u128 {
    let b = (k).min(m - 1) as u128;
    let a = (m + k - 1) as u128;
    let mut res: u128 = 1;
    for i in 1..=b {
        match res.checked_mul(a - b + i) {
            Some(v) => res = v / i,
            None => return u128::MAX,
        }
    }
    res
}

/// Lexicographic successor of a canonical nondecreasing multiset; false when
/// it wraps back to the first one.
fn advance_multiset(ms: &mut [usize], m: usize) -> bool {
    for pos in (0..ms.len()).rev() {
        if ms[pos] + 1 < m {
            let v = ms[pos] + 1;
            for slot in &mut ms[pos..] {
                *slot = v;
            }
            return true;
        }
    }
    for slot in ms.iter_mut() {
        *slot = 0;
    }
    false
}

fn supports_of(ms: &[usize], k: usize) -> Vec<(usize, f64)> {
    let kf = k as f64;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for &a in ms {
        match out.last_mut() {
            Some((prev, w)) if *prev == a => *w += 1.0 / kf,
            _ => out.push((a, 1.0 / kf)),
        }
    }
    out
}

/// Enumeration state over players `lo..n`, players below `lo` frozen.
struct Cursor<'g> {
    game: &'g Game,
    k: usize,
    eval_budget: u64,
    lo: usize,
    multisets: Vec<Vec<usize>>,
    supports: Vec<Vec<(usize, f64)>>,
    /// Cached deviation table of the last player, valid for the current
    /// prefix (players 0..n-1).
    t_inner: Vec<f64>,
}

impl<'g> Cursor<'g> {
    fn new(
        game: &'g Game,
        k: usize,
        eval_budget: u64,
        frozen: &[Vec<usize>],
    ) -> Result<Self, GameError> {
        let n = game.players();
        let lo = frozen.len();
        debug_assert!(lo < n);
        let mut multisets: Vec<Vec<usize>> = frozen.to_vec();
        multisets.resize(n, vec![0usize; k]);
        let supports: Vec<Vec<(usize, f64)>> =
            multisets.iter().map(|ms| supports_of(ms, k)).collect();
        let mut cursor = Cursor {
            game,
            k,
            eval_budget,
            lo,
            multisets,
            supports,
            t_inner: Vec::new(),
        };
        cursor.refresh_inner()?;
        Ok(cursor)
    }

    fn refresh_inner(&mut self) -> Result<(), GameError> {
        let last = self.game.players() - 1;
        self.t_inner = br_table_supports(self.game, last, &self.supports, self.eval_budget)?;
        Ok(())
    }

    /// Max regret when the current candidate passes the ε test, None when it
    /// is rejected early.
    fn check(&self, epsilon: f64) -> Result<Option<f64>, GameError> {
        let n = self.game.players();
        let last = n - 1;
        let bar = epsilon + REGRET_TOL;

        let best = self.t_inner.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let current: f64 = self.supports[last]
            .iter()
            .map(|&(a, p)| p * self.t_inner[a])
            .sum();
        let mut max_regret = (best - current).max(0.0);
        if max_regret > bar {
            return Ok(None);
        }
        for i in 0..last {
            let table = br_table_supports(self.game, i, &self.supports, self.eval_budget)?;
            let best = table.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let current: f64 = self.supports[i].iter().map(|&(a, p)| p * table[a]).sum();
            let regret = (best - current).max(0.0);
            if regret > bar {
                return Ok(None);
            }
            max_regret = max_regret.max(regret);
        }
        Ok(Some(max_regret))
    }

    fn profile(&self) -> KUniformProfile {
        KUniformProfile::new(self.game.actions(), self.multisets.clone())
            .expect("cursor state is always canonical")
    }

    /// Step to the next candidate; false when the free range wrapped.
    fn advance(&mut self) -> Result<bool, GameError> {
        let m = self.game.actions();
        let n = self.game.players();
        for player in (self.lo..n).rev() {
            let moved = advance_multiset(&mut self.multisets[player], m);
            self.supports[player] = supports_of(&self.multisets[player], self.k);
            if moved {
                if player != n - 1 {
                    self.refresh_inner()?;
                }
                return Ok(true);
            }
            // wrapped: this player reset to the first multiset; carry on.
        }
        Ok(false)
    }
}

fn check_config(game: &Game, cfg: &SearchConfig) -> Result<(), GameError> {
    if cfg.k == 0 {
        return Err(GameError::InvalidProfile("k must be positive".into()));
    }
    if cfg.enumeration_budget == 0 || cfg.eval_budget == 0 {
        return Err(GameError::BudgetExceeded {
            needed: 1,
            budget: 0,
        });
    }
    let _ = game;
    Ok(())
}

/// Deterministic scan of every canonical k-uniform profile in lexicographic
/// order, returning the first ε-equilibrium found.
pub fn exhaustive_search(game: &Game, cfg: &SearchConfig) -> Result<SearchResult, GameError> {
    check_config(game, cfg)?;
    let n = game.players();
    let m = game.actions();
    let per_player = multiset_count(m, cfg.k);
    let total = (0..n).fold(1u128, |acc, _| acc.saturating_mul(per_player));

    let use_parallel = cfg.parallel
        && n >= 2
        && total <= cfg.enumeration_budget as u128
        && per_player <= 100_000
        && rayon::current_num_threads() > 1;
    if use_parallel {
        return exhaustive_parallel(game, cfg, per_player as u64, total as u64);
    }

    let mut cursor = Cursor::new(game, cfg.k, cfg.eval_budget, &[])?;
    let mut visited: u64 = 0;
    loop {
        if visited >= cfg.enumeration_budget {
            return Ok(SearchResult {
                outcome: SearchOutcome::BudgetHit,
                witness: None,
                witness_regret: None,
                visited,
            });
        }
        visited += 1;
        if let Some(max_regret) = cursor.check(cfg.epsilon)? {
            return Ok(SearchResult {
                outcome: SearchOutcome::Found,
                witness: Some(cursor.profile()),
                witness_regret: Some(max_regret),
                visited,
            });
        }
        if !cursor.advance()? {
            return Ok(SearchResult {
                outcome: SearchOutcome::Exhausted,
                witness: None,
                witness_regret: None,
                visited,
            });
        }
    }
}

struct PrefixHit {
    local_index: u64,
    witness: KUniformProfile,
    witness_regret: f64,
}

fn scan_prefix(
    game: &Game,
    cfg: &SearchConfig,
    prefix: Vec<usize>,
    prefix_index: u64,
    best_prefix: &AtomicU64,
) -> Result<Option<PrefixHit>, GameError> {
    if best_prefix.load(Ordering::Relaxed) < prefix_index {
        return Ok(None);
    }
    let mut cursor = Cursor::new(game, cfg.k, cfg.eval_budget, &[prefix])?;
    let mut local: u64 = 0;
    loop {
        if local % 1024 == 0 && best_prefix.load(Ordering::Relaxed) < prefix_index {
            return Ok(None);
        }
        if let Some(max_regret) = cursor.check(cfg.epsilon)? {
            best_prefix.fetch_min(prefix_index, Ordering::Relaxed);
            return Ok(Some(PrefixHit {
                local_index: local,
                witness: cursor.profile(),
                witness_regret: max_regret,
            }));
        }
        local += 1;
        if !cursor.advance()? {
            return Ok(None);
        }
    }
}

fn exhaustive_parallel(
    game: &Game,
    cfg: &SearchConfig,
    per_player: u64,
    total: u64,
) -> Result<SearchResult, GameError> {
    let m = game.actions();
    let mut prefixes: Vec<Vec<usize>> = Vec::with_capacity(per_player as usize);
    let mut ms = vec![0usize; cfg.k];
    loop {
        prefixes.push(ms.clone());
        if !advance_multiset(&mut ms, m) {
            break;
        }
    }
    debug_assert_eq!(prefixes.len() as u64, per_player);
    let per_prefix = total / per_player;
    let best_prefix = AtomicU64::new(u64::MAX);

    let hit: Option<Result<(u64, PrefixHit), GameError>> = prefixes
        .into_par_iter()
        .enumerate()
        .filter_map(|(idx, prefix)| {
            match scan_prefix(game, cfg, prefix, idx as u64, &best_prefix) {
                Ok(Some(h)) => Some(Ok((idx as u64, h))),
                Ok(None) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .find_first(|_| true);

    match hit {
        Some(Err(e)) => Err(e),
        Some(Ok((prefix_index, h))) => Ok(SearchResult {
            outcome: SearchOutcome::Found,
            witness: Some(h.witness),
            witness_regret: Some(h.witness_regret),
            visited: prefix_index * per_prefix + h.local_index + 1,
        }),
        None => Ok(SearchResult {
            outcome: SearchOutcome::Exhausted,
            witness: None,
            witness_regret: None,
            visited: total,
        }),
    }
}

/// Mix a base seed with a stream index (splitmix64 finalizer) so every
/// sample, chunk, or worker gets an independent, reproducible stream.
pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw one ordered k-uniform profile: k i.i.d. uniform actions per player,
/// player-major draw order, then canonicalized.
fn sample_profile(game: &Game, k: usize, seed: u64, index: u64) -> KUniformProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index));
    let m = game.actions();
    let multisets: Vec<Vec<usize>> = (0..game.players())
        .map(|_| (0..k).map(|_| rng.gen_range(0..m)).collect())
        .collect();
    KUniformProfile::new(m, multisets).expect("sampled profile is valid")
}

fn sample_passes(game: &Game, cfg: &SearchConfig, index: u64) -> Result<Option<(KUniformProfile, f64)>, GameError> {
    let profile = sample_profile(game, cfg.k, cfg.seed, index);
    let report = kuniform_regret(game, &profile, cfg.eval_budget)?;
    if report.is_epsilon_equilibrium(cfg.epsilon) {
        Ok(Some((profile, report.max_regret)))
    } else {
        Ok(None)
    }
}

/// Uniform ordered sampling until an ε-equilibrium appears or `max_samples`
/// is exhausted. Thread-count-invariant: sample i always uses stream i.
pub fn sample_search(game: &Game, cfg: &SearchConfig) -> Result<SearchResult, GameError> {
    check_config(game, cfg)?;
    let found = if cfg.parallel && rayon::current_num_threads() > 1 {
        (0..cfg.max_samples)
            .into_par_iter()
            .map(|i| sample_passes(game, cfg, i).map(|hit| (i, hit)))
            .find_first(|r| !matches!(r, Ok((_, None))))
    } else {
        let mut first = None;
        for i in 0..cfg.max_samples {
            match sample_passes(game, cfg, i) {
                Ok(None) => continue,
                other => {
                    first = Some(other.map(|hit| (i, hit)));
                    break;
                }
            }
        }
        first
    };
    match found {
        Some(Err(e)) => Err(e),
        Some(Ok((i, Some((witness, regret))))) => Ok(SearchResult {
            outcome: SearchOutcome::Found,
            witness: Some(witness),
            witness_regret: Some(regret),
            visited: i + 1,
        }),
        _ => Ok(SearchResult {
            outcome: SearchOutcome::BudgetHit,
            witness: None,
            witness_regret: None,
            visited: cfg.max_samples,
        }),
    }
}

/// How many of `samples` independent uniform ordered draws are
/// ε-equilibria. Used for density estimates.
pub fn sample_hits(game: &Game, cfg: &SearchConfig, samples: u64) -> Result<u64, GameError> {
    check_config(game, cfg)?;
    if cfg.parallel && rayon::current_num_threads() > 1 {
        (0..samples)
            .into_par_iter()
            .map(|i| sample_passes(game, cfg, i).map(|hit| u64::from(hit.is_some())))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    } else {
        let mut hits = 0;
        for i in 0..samples {
            hits += u64::from(sample_passes(game, cfg, i)?.is_some());
        }
        Ok(hits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    /// Exact number of *ordered* k-uniform ε-equilibria.
    pub ordered_count: BigUint,
    /// Canonical (multiset) profiles enumerated.
    pub canonical_visited: u64,
    /// `m^(kn)`, the ordered profile space.
    pub total_ordered: BigUint,
}

fn factorials(k: usize) -> Vec<BigUint> {
    let mut f = Vec::with_capacity(k + 1);
    f.push(BigUint::one());
    for i in 1..=k {
        let next = &f[i - 1] * BigUint::from(i);
        f.push(next);
    }
    f
}

/// Orderings of one player's multiset: the multinomial `k! / prod c_a!`.
fn orderings(counts: &[usize], fact: &[BigUint]) -> BigUint {
    let k: usize = counts.iter().sum();
    let mut w = fact[k].clone();
    for &c in counts {
        if c > 1 {
            w /= &fact[c];
        }
    }
    w
}

/// Exact ordered ε-equilibrium count: enumerate canonical multisets once and
/// weight each hit by the number of orderings per player.
pub fn count_ordered_equilibria(game: &Game, cfg: &SearchConfig) -> Result<CountResult, GameError> {
    check_config(game, cfg)?;
    let n = game.players();
    let m = game.actions();
    let per_player = multiset_count(m, cfg.k);
    let total = (0..n).fold(1u128, |acc, _| acc.saturating_mul(per_player));
    if total > cfg.enumeration_budget as u128 {
        return Err(GameError::BudgetExceeded {
            needed: total,
            budget: cfg.enumeration_budget,
        });
    }
    let fact = factorials(cfg.k);
    let total_ordered = BigUint::from(m).pow((cfg.k * n) as u32);

    let count_range = |frozen: &[Vec<usize>]| -> Result<BigUint, GameError> {
        let mut cursor = Cursor::new(game, cfg.k, cfg.eval_budget, frozen)?;
        let mut acc = BigUint::zero();
        loop {
            if cursor.check(cfg.epsilon)?.is_some() {
                let profile = cursor.profile();
                let mut w = BigUint::one();
                for i in 0..n {
                    w *= orderings(&profile.counts(i), &fact);
                }
                acc += w;
            }
            if !cursor.advance()? {
                return Ok(acc);
            }
        }
    };

    let use_parallel = cfg.parallel
        && n >= 2
        && per_player <= 100_000
        && rayon::current_num_threads() > 1;
    let ordered_count = if use_parallel {
        let mut prefixes: Vec<Vec<usize>> = Vec::with_capacity(per_player as usize);
        let mut ms = vec![0usize; cfg.k];
        loop {
            prefixes.push(ms.clone());
            if !advance_multiset(&mut ms, m) {
                break;
            }
        }
        prefixes
            .into_par_iter()
            .map(|prefix| count_range(&[prefix]))
            .try_reduce(BigUint::zero, |a, b| Ok(a + b))?
    } else {
        count_range(&[])?
    };

    Ok(CountResult {
        ordered_count,
        canonical_visited: total as u64,
        total_ordered,
    })
}

#[derive(Debug, Clone)]
pub enum MinimalKOutcome {
    Found {
        k: usize,
        witness: KUniformProfile,
        witness_regret: f64,
        visited: u64,
    },
    NoneFound {
        k_max: usize,
    },
    BudgetHit {
        k: usize,
        visited: u64,
    },
}

/// Smallest k in `1..=k_max` whose exhaustive scan finds an ε-equilibrium.
pub fn minimal_k(
    game: &Game,
    epsilon: f64,
    k_max: usize,
    base: &SearchConfig,
) -> Result<MinimalKOutcome, GameError> {
    for k in 1..=k_max {
        let cfg = SearchConfig {
            k,
            epsilon,
            ..base.clone()
        };
        let result = exhaustive_search(game, &cfg)?;
        match result.outcome {
            SearchOutcome::Found => {
                return Ok(MinimalKOutcome::Found {
                    k,
                    witness: result.witness.expect("found implies witness"),
                    witness_regret: result.witness_regret.expect("found implies regret"),
                    visited: result.visited,
                })
            }
            SearchOutcome::BudgetHit => {
                return Ok(MinimalKOutcome::BudgetHit {
                    k,
                    visited: result.visited,
                })
            }
            SearchOutcome::Exhausted => continue,
        }
    }
    Ok(MinimalKOutcome::NoneFound { k_max })
}

/// Does every action get probability at most `c/m` (plus exact-value
/// slack)? A uniform profile is 1-small; c ≥ m accepts everything.
pub fn is_c_small(x: &MixedProfile, c: f64) -> bool {
    let bar = c / x.actions() as f64 + VALUE_TOL;
    x.strategies()
        .iter()
        .all(|s| s.iter().all(|&p| p <= bar))
}

#[cfg(test)]
mod tests;
