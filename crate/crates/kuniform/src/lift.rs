//! Population lift: replace every player of a base game with a population of
//! k clones. A clone's payoff is its base payoff against the *aggregates*
//! (empirical action mixes) of the other populations; its own population's
//! aggregate never enters its own payoff.
//!
//! The lift is kept implicit — payoffs are evaluated through the base game —
//! so only micro instances are ever materialized.

use crate::game::{
    br_table_supports, kuniform_regret, regret, Game, GameError, KUniformProfile, MixedProfile,
    PayoffFn, PlayerRegret, RegretReport,
};

/// Pure profile of the lifted game: one ordered length-k action sequence per
/// population.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiftedPureProfile {
    populations: Vec<Vec<usize>>,
}

impl LiftedPureProfile {
    pub fn new(populations: Vec<Vec<usize>>) -> Result<Self, GameError> {
        if populations.is_empty() {
            return Err(GameError::InvalidProfile("no populations".into()));
        }
        let k = populations[0].len();
        if k == 0 || populations.iter().any(|p| p.len() != k) {
            return Err(GameError::InvalidProfile(
                "all populations must share a positive member count".into(),
            ));
        }
        Ok(LiftedPureProfile { populations })
    }

    pub fn k(&self) -> usize {
        self.populations[0].len()
    }

    pub fn populations(&self) -> &[Vec<usize>] {
        &self.populations
    }

    pub fn action(&self, population: usize, member: usize) -> usize {
        self.populations[population][member]
    }
}

/// Canonical ordered representative of a k-uniform profile (members sorted by
/// action). Any ordering has the same lifted max regret.
pub fn ordered_representative(profile: &KUniformProfile) -> LiftedPureProfile {
    LiftedPureProfile {
        populations: profile.multisets().to_vec(),
    }
}

/// Forget the ordering: sort each population's actions into a multiset.
pub fn project_profile(
    profile: &LiftedPureProfile,
    actions: usize,
) -> Result<KUniformProfile, GameError> {
    KUniformProfile::new(actions, profile.populations.clone())
}

/// Assign every clone in population i the base mixed strategy `x_i`.
/// The result indexes the nk lifted players population-major.
pub fn lift_mixed_profile(x: &MixedProfile, k: usize) -> MixedProfile {
    let mut strategies = Vec::with_capacity(x.players() * k);
    for i in 0..x.players() {
        for _ in 0..k {
            strategies.push(x.strategy(i).to_vec());
        }
    }
    MixedProfile::new(strategies).expect("clone strategies stay valid")
}

#[derive(Debug, Clone)]
pub struct LiftedGame {
    base: Game,
    k: usize,
}

impl LiftedGame {
    pub fn new(base: Game, k: usize) -> Result<Self, GameError> {
        if k == 0 {
            return Err(GameError::Dimension("k must be positive".into()));
        }
        Ok(LiftedGame { base, k })
    }

    pub fn base(&self) -> &Game {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of lifted players, nk.
    pub fn players(&self) -> usize {
        self.base.players() * self.k
    }

    pub fn actions(&self) -> usize {
        self.base.actions()
    }

    /// (population, member) of a lifted player index.
    pub fn split(&self, player: usize) -> (usize, usize) {
        (player / self.k, player % self.k)
    }

    /// Every unilateral deviation moves any lifted payoff by at most 1/k.
    pub fn lipschitz_bound(&self) -> f64 {
        1.0 / self.k as f64
    }

    /// Dependency count for concentration queries: clones of the base
    /// dependencies, `|deps_base(i)| * k`.
    pub fn degree_for(&self, population: usize) -> usize {
        self.base.declared_dependencies(population).len() * self.k
    }

    fn check_profile(&self, profile: &LiftedPureProfile) -> Result<(), GameError> {
        if profile.populations.len() != self.base.players() || profile.k() != self.k {
            return Err(GameError::InvalidProfile(format!(
                "lifted profile shape {}x{} does not match {} populations of {}",
                profile.populations.len(),
                profile.k(),
                self.base.players(),
                self.k
            )));
        }
        if profile
            .populations
            .iter()
            .flatten()
            .any(|&a| a >= self.base.actions())
        {
            return Err(GameError::InvalidProfile(
                "profile uses an out-of-range action".into(),
            ));
        }
        Ok(())
    }

    /// Aggregate support pairs of every population. The evaluated player's
    /// own population entry is present but never read by base evaluation.
    fn aggregate_supports(&self, profile: &LiftedPureProfile) -> Vec<Vec<(usize, f64)>> {
        let m = self.base.actions();
        let k = self.k as f64;
        profile
            .populations
            .iter()
            .map(|members| {
                let mut counts = vec![0usize; m];
                for &a in members {
                    counts[a] += 1;
                }
                counts
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, c)| c > 0)
                    .map(|(a, c)| (a, c as f64 / k))
                    .collect()
            })
            .collect()
    }

    /// Payoff of clone `(population, member)` at a lifted pure profile.
    pub fn lifted_payoff(
        &self,
        population: usize,
        member: usize,
        profile: &LiftedPureProfile,
        budget: u64,
    ) -> Result<f64, GameError> {
        self.check_profile(profile)?;
        if population >= self.base.players() || member >= self.k {
            return Err(GameError::PlayerIndex {
                player: population * self.k + member,
                players: self.players(),
            });
        }
        let supports = self.aggregate_supports(profile);
        let table = br_table_supports(&self.base, population, &supports, budget)?;
        Ok(table[profile.action(population, member)])
    }

    /// Regret of every clone at a lifted pure profile. All clones of one
    /// population share a deviation table (their own aggregate never enters
    /// their own payoff), so the scan costs n best-response tables.
    pub fn pure_regret(
        &self,
        profile: &LiftedPureProfile,
        budget: u64,
    ) -> Result<RegretReport, GameError> {
        self.check_profile(profile)?;
        let supports = self.aggregate_supports(profile);
        let mut players = Vec::with_capacity(self.players());
        for population in 0..self.base.players() {
            let table = br_table_supports(&self.base, population, &supports, budget)?;
            let best_response = table.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for member in 0..self.k {
                let current = table[profile.action(population, member)];
                players.push(PlayerRegret {
                    current,
                    best_response,
                    regret: (best_response - current).max(0.0),
                });
            }
        }
        Ok(RegretReport::from_players(players))
    }

    /// Write the lift out as a dense nk-player game. Only sensible at micro
    /// scale; `budget` caps the `nk * m^(nk)` entries.
    pub fn materialize(&self, budget: u64) -> Result<Game, GameError> {
        let n = self.base.players();
        let m = self.base.actions();
        let nk = self.players();
        let needed = (m as u128).pow(nk as u32) * nk as u128;
        if needed > budget as u128 {
            return Err(GameError::BudgetExceeded { needed, budget });
        }
        let size = m.pow(nk as u32);
        let mut tensors = vec![vec![0.0f64; size]; nk];
        let mut digits = vec![0usize; nk];
        for idx in 0..size {
            let mut rem = idx;
            for p in (0..nk).rev() {
                digits[p] = rem % m;
                rem /= m;
            }
            let profile = LiftedPureProfile {
                populations: digits.chunks(self.k).map(<[usize]>::to_vec).collect(),
            };
            let supports = self.aggregate_supports(&profile);
            for population in 0..n {
                let table = br_table_supports(&self.base, population, &supports, budget)?;
                for member in 0..self.k {
                    tensors[population * self.k + member][idx] =
                        table[profile.action(population, member)];
                }
            }
        }
        Game::dense(nk, m, tensors)
    }
}

impl PayoffFn for LiftedGame {
    fn players(&self) -> usize {
        self.players()
    }

    fn actions(&self) -> usize {
        self.actions()
    }

    fn pure_payoff(&self, player: usize, profile: &[usize]) -> f64 {
        debug_assert_eq!(profile.len(), self.players());
        let (population, member) = self.split(player);
        let lifted = LiftedPureProfile {
            populations: profile.chunks(self.k).map(<[usize]>::to_vec).collect(),
        };
        self.lifted_payoff(population, member, &lifted, u64::MAX)
            .expect("pure lifted evaluation has bounded support")
    }

    /// Exact lifted expected payoff against independent mixed clones: by
    /// linearity in each clone's strategy, this equals the base payoff
    /// against each other population's *mean* strategy.
    fn payoff_vs_mixed(
        &self,
        player: usize,
        own: usize,
        x: &MixedProfile,
        budget: u64,
    ) -> Result<f64, GameError> {
        if x.players() != self.players() || x.actions() != self.actions() {
            return Err(GameError::InvalidProfile(format!(
                "profile shape {}x{} does not match lifted game {}x{}",
                x.players(),
                x.actions(),
                self.players(),
                self.actions()
            )));
        }
        let (population, _) = self.split(player);
        let m = self.actions();
        let k = self.k as f64;
        let mean_supports: Vec<Vec<(usize, f64)>> = (0..self.base.players())
            .map(|i| {
                let mut mean = vec![0.0f64; m];
                for member in 0..self.k {
                    for (a, slot) in mean.iter_mut().enumerate() {
                        *slot += x.strategy(i * self.k + member)[a] / k;
                    }
                }
                mean.into_iter()
                    .enumerate()
                    .filter(|&(_, p)| p > 0.0)
                    .collect()
            })
            .collect();
        let table = br_table_supports(&self.base, population, &mean_supports, budget)?;
        Ok(table[own])
    }

    fn dependencies(&self, player: usize) -> Vec<usize> {
        let (population, _) = self.split(player);
        let mut deps = Vec::new();
        for i in self.base.declared_dependencies(population) {
            for member in 0..self.k {
                deps.push(i * self.k + member);
            }
        }
        deps
    }
}

/// Check both sides of the population correspondence at one profile:
/// is `profile` an ε-equilibrium of the lift, and is its aggregate a
/// k-uniform ε-equilibrium of the base game?
pub fn verify_correspondence(
    base: &Game,
    k: usize,
    epsilon: f64,
    profile: &LiftedPureProfile,
    budget: u64,
) -> Result<(bool, bool), GameError> {
    let lifted = LiftedGame::new(base.clone(), k)?;
    let lifted_ok = lifted
        .pure_regret(profile, budget)?
        .is_epsilon_equilibrium(epsilon);
    let aggregate = project_profile(profile, base.actions())?;
    let base_ok = kuniform_regret(base, &aggregate, budget)?.is_epsilon_equilibrium(epsilon);
    Ok((lifted_ok, base_ok))
}

/// Max regret in the lift of a fully mixed clone profile, via the
/// materialized dense game. Micro scale only.
pub fn lifted_mixed_regret(
    lifted: &LiftedGame,
    x: &MixedProfile,
    budget: u64,
) -> Result<RegretReport, GameError> {
    let dense = lifted.materialize(budget)?;
    regret(&dense, x, budget)
}
