//! Small-support approximate equilibria for finite games.
//!
//! The crate revolves around one construction: splitting each player of a
//! game into k identical members who play against the other populations'
//! empirical action mixes. Pure profiles of the split game correspond to
//! k-uniform profiles (all probabilities multiples of 1/k) of the original,
//! the split game's payoff sensitivity to any single member is 1/k, and
//! equilibria with such coarse probabilities can be found by enumeration or
//! plain sampling once k clears an O(ln(nm)/ε²) threshold.
//!
//! Module map:
//! - [`game`]: dense and graphical games, profiles, regret.
//! - [`lift`]: the population split, projections, and its verified
//!   contraction/correspondence properties.
//! - [`bounds`]: closed-form support, density, sample, and concentration
//!   bounds.
//! - [`search`]: exhaustive, sampled, counting, and minimal-k searches over
//!   k-uniform profiles.
//! - [`oracle`]: slow independent recomputations for cross-checking, plus
//!   the empirical concentration experiment.
//! - [`io`], [`gen`], [`experiment`]: JSON files, seeded instance
//!   generators, and the CSV experiment runner.

pub mod bounds;
pub mod experiment;
pub mod game;
pub mod gen;
pub mod io;
pub mod lift;
pub mod oracle;
pub mod search;

pub use bounds::{
    concentration_bound, corollary2_samples, k_general, k_graphical, theorem2_lower_bound,
    BoundsError, DensityBound,
};
pub use experiment::{parse_experiment, run_experiment, ExperimentSpec, KPolicy};
pub use game::{
    best_response_table, dependency_structure, expected_payoff, kuniform_regret,
    lipschitz_constant, payoff_vs_mixed, regret, Game, GameError, KUniformProfile, MixedProfile,
    PayoffFn, RegretReport, DEFAULT_EVAL_BUDGET, REGRET_TOL, VALUE_TOL,
};
pub use gen::{generate, GenError, GenParams, GENERATOR_KINDS};
pub use io::{
    load_game, load_profile, parse_game, parse_profile, save_game, save_profile, serialize_game,
    serialize_profile, IoError, ProfileFile,
};
pub use lift::{
    lift_mixed_profile, lifted_mixed_regret, ordered_representative, project_profile,
    verify_correspondence, LiftedGame, LiftedPureProfile,
};
pub use oracle::{
    brute_force_pure_equilibria, direct_ordered_equilibrium_count, empirical_concentration,
    grid_min_regret, naive_regret, naive_value, ConcentrationQuery, ConcentrationReport,
};
pub use search::{
    count_ordered_equilibria, exhaustive_search, is_c_small, minimal_k, multiset_count,
    sample_hits, sample_search, CountResult, MinimalKOutcome, SearchConfig, SearchOutcome,
    SearchResult,
};
