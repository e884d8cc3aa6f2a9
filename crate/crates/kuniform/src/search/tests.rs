use proptest::prelude::*;

use super::*;
use crate::game::Game;

fn matching() -> Game {
    Game::dense(
        2,
        2,
        vec![vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]],
    )
    .unwrap()
}

fn cfg(k: usize, epsilon: f64) -> SearchConfig {
    SearchConfig {
        k,
        epsilon,
        ..SearchConfig::default()
    }
}

#[test]
fn multiset_count_small_values() {
    assert_eq!(multiset_count(2, 1), 2);
    assert_eq!(multiset_count(2, 2), 3);
    assert_eq!(multiset_count(3, 2), 6);
    assert_eq!(multiset_count(3, 3), 10);
    assert_eq!(multiset_count(2, 45), 46);
    assert_eq!(multiset_count(1, 7), 1);
    assert_eq!(multiset_count(4, 0), 1);
}

#[test]
fn exhaustive_enumeration_order_is_frozen() {
    // Candidates go lexicographically, last player fastest. For the
    // matching game at k=2 the multisets per player are (0,0), (0,1),
    // (1,1); the first equilibrium is (mixed, mixed), the 5th candidate.
    let g = matching();
    let r = exhaustive_search(&g, &cfg(2, 0.0)).unwrap();
    assert_eq!(r.outcome, SearchOutcome::Found);
    assert_eq!(r.visited, 5);
    let w = r.witness.unwrap();
    assert_eq!(w.multisets(), &[vec![0, 1], vec![0, 1]]);
    assert!(r.witness_regret.unwrap() < 1e-15);
}

#[test]
fn exhaustive_exhausts_when_nothing_qualifies() {
    // No pure equilibrium exists in the matching game, so k=1 scans all
    // 4 candidates and gives up.
    let r = exhaustive_search(&matching(), &cfg(1, 0.0)).unwrap();
    assert_eq!(r.outcome, SearchOutcome::Exhausted);
    assert_eq!(r.visited, 4);
    assert!(r.witness.is_none());
}

#[test]
fn exhaustive_accepts_first_candidate_at_loose_tolerance() {
    // At ε = 1 every profile of a unit-payoff game qualifies.
    let r = exhaustive_search(&matching(), &cfg(1, 1.0)).unwrap();
    assert_eq!(r.outcome, SearchOutcome::Found);
    assert_eq!(r.visited, 1);
    assert_eq!(r.witness.unwrap().multisets(), &[vec![0], vec![0]]);
}

#[test]
fn exhaustive_reports_budget_exhaustion() {
    let mut c = cfg(2, 0.0);
    c.enumeration_budget = 3;
    let r = exhaustive_search(&matching(), &c).unwrap();
    assert_eq!(r.outcome, SearchOutcome::BudgetHit);
    assert_eq!(r.visited, 3);
}

#[test]
fn parallel_and_sequential_scans_agree_exactly() {
    for seed in 0..10u64 {
        let g = crate::gen::generate("random-dense", &crate::gen::GenParams::default(), seed)
            .unwrap();
        for eps in [0.0, 0.1, 0.5] {
            let mut sequential = cfg(2, eps);
            let mut parallel = cfg(2, eps);
            sequential.parallel = false;
            parallel.parallel = true;
            let a = exhaustive_search(&g, &sequential).unwrap();
            let b = exhaustive_search(&g, &parallel).unwrap();
            assert_eq!(a.outcome, b.outcome, "seed {seed} eps {eps}");
            assert_eq!(a.visited, b.visited, "seed {seed} eps {eps}");
            assert_eq!(a.witness, b.witness, "seed {seed} eps {eps}");
        }
    }
}

#[test]
fn ordered_count_hand_value() {
    // 12 of the 16 ordered half-resolution profiles of the matching game
    // pass at ε = 0.5: the 4 orderings of (mixed, mixed), plus the 8
    // profiles pairing a pure population with the mixed one.
    let r = count_ordered_equilibria(&matching(), &cfg(2, 0.5)).unwrap();
    assert_eq!(r.ordered_count, 12u32.into());
    assert_eq!(r.total_ordered, 16u32.into());
    assert_eq!(r.canonical_visited, 9);
}

#[test]
fn ordered_count_exact_equilibrium_only() {
    let r = count_ordered_equilibria(&matching(), &cfg(2, 0.0)).unwrap();
    assert_eq!(r.ordered_count, 4u32.into());
}

#[test]
fn ordered_count_respects_enumeration_budget() {
    let mut c = cfg(2, 0.5);
    c.enumeration_budget = 8;
    assert!(matches!(
        count_ordered_equilibria(&matching(), &c),
        Err(crate::game::GameError::BudgetExceeded { needed: 9, .. })
    ));
}

#[test]
fn parallel_count_matches_sequential() {
    for seed in 0..5u64 {
        let g = crate::gen::generate("random-dense", &crate::gen::GenParams::default(), seed)
            .unwrap();
        let mut sequential = cfg(3, 0.25);
        let mut parallel = sequential.clone();
        sequential.parallel = false;
        parallel.parallel = true;
        assert_eq!(
            count_ordered_equilibria(&g, &sequential).unwrap(),
            count_ordered_equilibria(&g, &parallel).unwrap()
        );
    }
}

#[test]
fn sampling_is_reproducible_and_parallel_invariant() {
    let g = matching();
    let mut c = cfg(2, 0.5);
    c.max_samples = 500;
    c.seed = 42;
    let a = sample_search(&g, &c).unwrap();
    let b = sample_search(&g, &c).unwrap();
    assert_eq!(a.outcome, b.outcome);
    assert_eq!(a.visited, b.visited);
    assert_eq!(a.witness, b.witness);
    c.parallel = true;
    let p = sample_search(&g, &c).unwrap();
    assert_eq!(a.visited, p.visited);
    assert_eq!(a.witness, p.witness);
}

#[test]
fn sampling_hit_rate_tracks_the_exact_density() {
    // Exactly 12/16 ordered draws qualify, so 2000 draws should land near
    // 0.75; 4 binomial standard deviations is a 1-in-16000 flake at worst,
    // and the seed is fixed anyway.
    let g = matching();
    let mut c = cfg(2, 0.5);
    c.seed = 7;
    let hits = sample_hits(&g, &c, 2000).unwrap() as f64 / 2000.0;
    let sigma = (0.25f64 / 2000.0).sqrt();
    assert!((hits - 0.75).abs() <= 4.0 * sigma, "hit rate {hits}");
    // Chunk-free sampling must agree with itself under parallel scheduling.
    c.parallel = true;
    let again = sample_hits(&g, &c, 2000).unwrap();
    assert_eq!(again as f64 / 2000.0, hits);
}

#[test]
fn sampling_gives_up_at_the_draw_budget() {
    let g = matching();
    let mut c = cfg(1, 0.0);
    c.max_samples = 100;
    let r = sample_search(&g, &c).unwrap();
    assert_eq!(r.outcome, SearchOutcome::BudgetHit);
    assert_eq!(r.visited, 100);
}

#[test]
fn minimal_k_on_the_matching_game() {
    // k=1 has no pure equilibrium; k=2 hits the half-half profile.
    let out = minimal_k(&matching(), 0.0, 3, &SearchConfig::default()).unwrap();
    match out {
        MinimalKOutcome::Found {
            k,
            witness,
            witness_regret,
            visited,
        } => {
            assert_eq!(k, 2);
            assert_eq!(witness.multisets(), &[vec![0, 1], vec![0, 1]]);
            assert!(witness_regret < 1e-15);
            assert_eq!(visited, 5);
        }
        other => panic!("expected a k=2 witness, got {other:?}"),
    }
    let none = minimal_k(&matching(), 0.0, 1, &SearchConfig::default()).unwrap();
    assert!(matches!(none, MinimalKOutcome::NoneFound { k_max: 1 }));
}

#[test]
fn small_probability_test_hand_values() {
    let uniform = crate::game::MixedProfile::uniform(2, 4);
    assert!(is_c_small(&uniform, 1.0));
    let pure = crate::game::MixedProfile::pure(2, 4, &[0, 1]);
    assert!(!is_c_small(&pure, 1.0));
    assert!(is_c_small(&pure, 4.0));
    let skew = crate::game::MixedProfile::new(vec![vec![0.5, 0.5, 0.0, 0.0]; 2]).unwrap();
    assert!(is_c_small(&skew, 2.0));
    assert!(!is_c_small(&skew, 1.9));
}

#[test]
fn derived_streams_differ_by_index() {
    let s: Vec<u64> = (0..100).map(|i| derive_seed(12345, i)).collect();
    let mut dedup = s.clone();
    dedup.sort_unstable();
    dedup.dedup();
    assert_eq!(dedup.len(), s.len());
    assert_eq!(derive_seed(12345, 7), derive_seed(12345, 7));
    assert_ne!(derive_seed(12345, 7), derive_seed(12346, 7));
}

#[test]
fn zero_k_and_zero_budgets_are_rejected() {
    let g = matching();
    assert!(exhaustive_search(&g, &cfg(0, 0.0)).is_err());
    let mut c = cfg(1, 0.0);
    c.enumeration_budget = 0;
    assert!(exhaustive_search(&g, &c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn found_witnesses_really_are_equilibria(
        seed in 0u64..1000,
        k in 1usize..=3,
        eps in prop_oneof![Just(0.1), Just(0.3), Just(0.5)],
    ) {
        let g = crate::gen::generate(
            "random-dense",
            &crate::gen::GenParams { players: 2, actions: 2, degree: 0 },
            seed,
        )
        .unwrap();
        let r = exhaustive_search(&g, &cfg(k, eps)).unwrap();
        if let Some(w) = r.witness {
            let report = crate::game::kuniform_regret(&g, &w, crate::game::DEFAULT_EVAL_BUDGET)?;
            prop_assert!(report.is_epsilon_equilibrium(eps));
            prop_assert!((report.max_regret - r.witness_regret.unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn count_never_exceeds_the_ordered_space(
        seed in 0u64..500,
        k in 1usize..=2,
        eps in prop_oneof![Just(0.0), Just(0.25), Just(0.5)],
    ) {
        let g = crate::gen::generate(
            "random-dense",
            &crate::gen::GenParams { players: 2, actions: 3, degree: 0 },
            seed,
        )
        .unwrap();
        let r = count_ordered_equilibria(&g, &cfg(k, eps)).unwrap();
        prop_assert!(r.ordered_count <= r.total_ordered);
    }

    #[test]
    fn looser_tolerance_never_shrinks_the_count(seed in 0u64..200) {
        let g = crate::gen::generate(
            "random-dense",
            &crate::gen::GenParams { players: 2, actions: 2, degree: 0 },
            seed,
        )
        .unwrap();
        let tight = count_ordered_equilibria(&g, &cfg(2, 0.1)).unwrap();
        let loose = count_ordered_equilibria(&g, &cfg(2, 0.4)).unwrap();
        prop_assert!(tight.ordered_count <= loose.ordered_count);
    }
}
