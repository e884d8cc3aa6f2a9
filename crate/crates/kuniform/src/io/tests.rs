use serde_json::json;

use super::*;
use crate::game::{Form, KUniformProfile, MixedProfile};
use crate::lift::LiftedPureProfile;

fn matching() -> Game {
    Game::dense(
        2,
        2,
        vec![vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]],
    )
    .unwrap()
}

#[test]
fn canonical_round_trip_is_byte_identical() {
    let bytes = serialize_game(&matching());
    let parsed = parse_game(&bytes).unwrap();
    assert_eq!(parsed, matching());
    assert_eq!(serialize_game(&parsed), bytes);
}

#[test]
fn graphical_round_trip_is_byte_identical() {
    let g = Game::graphical(
        3,
        2,
        vec![
            crate::game::LocalTable {
                deps: vec![1],
                table: vec![0.25, 0.5, 0.75, 1.0],
            },
            crate::game::LocalTable {
                deps: vec![0, 2],
                table: (0..8).map(|i| i as f64 / 7.0).collect(),
            },
            crate::game::LocalTable {
                deps: vec![],
                table: vec![0.125, 0.875],
            },
        ],
    )
    .unwrap();
    let bytes = serialize_game(&g);
    let parsed = parse_game(&bytes).unwrap();
    assert_eq!(parsed, g);
    assert_eq!(serialize_game(&parsed), bytes);
}

#[test]
fn awkward_floats_survive_bit_exact() {
    let vals = vec![0.1 + 0.2, 1.0 / 3.0, 1.0 - f64::EPSILON, 5e-324];
    let g = Game::dense(2, 2, vec![vals.clone(), vals.clone()]).unwrap();
    let parsed = parse_game(&serialize_game(&g)).unwrap();
    match parsed.form() {
        Form::Dense(tensors) => {
            for t in tensors {
                for (a, b) in t.iter().zip(&vals) {
                    assert_eq!(a.to_bits(), b.to_bits());
                }
            }
        }
        Form::Graphical(_) => panic!("expected dense"),
    }
}

#[test]
fn meta_rides_along_untouched() {
    let mut g = matching();
    g.meta = Some(json!({"source": "unit-test", "tags": ["a", "b"], "nested": {"x": 1}}));
    let parsed = parse_game(&serialize_game(&g)).unwrap();
    assert_eq!(parsed.meta, g.meta);
}

#[test]
fn out_of_range_payoff_without_scale_is_a_range_error() {
    let doc = json!({
        "players": 2,
        "actions": 2,
        "form": "dense",
        "payoffs": [[[1.5, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]],
    });
    let err = parse_game(doc.to_string().as_bytes()).unwrap_err();
    assert!(matches!(
        err,
        IoError::Range {
            player: 0,
            index: 0,
            ..
        }
    ));
    assert!(err.to_string().contains("scale"));
}

#[test]
fn declared_scale_maps_payoffs_onto_the_unit_interval() {
    let doc = json!({
        "players": 2,
        "actions": 2,
        "form": "dense",
        "payoffs": [[[-1.0, 1.0], [0.0, 1.0]], [[1.0, -1.0], [-1.0, 0.5]]],
        "scale": [-1.0, 1.0],
    });
    let g = parse_game(doc.to_string().as_bytes()).unwrap();
    assert_eq!(g.payoff(0, &[0, 0]), 0.0);
    assert_eq!(g.payoff(0, &[0, 1]), 1.0);
    assert_eq!(g.payoff(0, &[1, 0]), 0.5);
    assert_eq!(g.payoff(1, &[1, 1]), 0.75);

    // Values outside the declared range still fail.
    let doc = json!({
        "players": 1,
        "actions": 2,
        "form": "dense",
        "payoffs": [[0.0, 2.5]],
        "scale": [-1.0, 1.0],
    });
    assert!(matches!(
        parse_game(doc.to_string().as_bytes()),
        Err(IoError::Range { index: 1, .. })
    ));
    // Degenerate scale pairs are field errors.
    let doc = json!({
        "players": 1,
        "actions": 2,
        "form": "dense",
        "payoffs": [[0.0, 1.0]],
        "scale": [1.0, 1.0],
    });
    assert!(matches!(
        parse_game(doc.to_string().as_bytes()),
        Err(IoError::Field(_))
    ));
}

#[test]
fn wrong_table_length_is_a_dimension_error() {
    // Dependency on player 2 (1-based) means a 2-axis table of 4 entries;
    // 6 entries must be rejected.
    let doc = json!({
        "players": 2,
        "actions": 2,
        "form": "graphical",
        "payoffs": [
            {"deps": [2], "table": [0.0, 1.0, 1.0, 0.0, 0.5, 0.5]},
            {"deps": [1], "table": [0.0, 1.0, 1.0, 0.0]},
        ],
    });
    assert!(matches!(
        parse_game(doc.to_string().as_bytes()),
        Err(IoError::Dimension(_))
    ));
}

#[test]
fn malformed_json_is_reported_as_such() {
    assert!(matches!(
        parse_game(b"{\"players\": 2,"),
        Err(IoError::Json(_))
    ));
    assert!(matches!(parse_game(b"[]"), Err(IoError::Json(_))));
}

#[test]
fn unknown_form_and_bad_deps_are_field_errors() {
    let doc = json!({
        "players": 2, "actions": 2, "form": "bimatrix",
        "payoffs": [[0.0], [0.0]],
    });
    assert!(matches!(
        parse_game(doc.to_string().as_bytes()),
        Err(IoError::Field(_))
    ));
    // Dependency index 0 is invalid in 1-based files.
    let doc = json!({
        "players": 2, "actions": 2, "form": "graphical",
        "payoffs": [
            {"deps": [0], "table": [0.0, 1.0, 1.0, 0.0]},
            {"deps": [1], "table": [0.0, 1.0, 1.0, 0.0]},
        ],
    });
    assert!(matches!(
        parse_game(doc.to_string().as_bytes()),
        Err(IoError::Field(_))
    ));
}

#[test]
fn flat_payoff_arrays_parse_like_nested_ones() {
    let nested = json!({
        "players": 2, "actions": 2, "form": "dense",
        "payoffs": [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]],
    });
    let flat = json!({
        "players": 2, "actions": 2, "form": "dense",
        "payoffs": [[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0]],
    });
    assert_eq!(
        parse_game(nested.to_string().as_bytes()).unwrap(),
        parse_game(flat.to_string().as_bytes()).unwrap()
    );
}

#[test]
fn unequal_action_counts_pad_by_clamping() {
    // Player 1 has 2 real actions; after padding to 3, its phantom third
    // action behaves exactly like action 2, for every player's payoffs.
    let doc = json!({
        "players": 2,
        "actions": [3, 2],
        "form": "dense",
        "payoffs": [
            [[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]],
            [[0.9, 0.8], [0.7, 0.6], [0.5, 0.4]],
        ],
    });
    let g = parse_game(doc.to_string().as_bytes()).unwrap();
    assert_eq!(g.actions(), 3);
    for a0 in 0..3 {
        for player in 0..2 {
            assert_eq!(g.payoff(player, &[a0, 2]), g.payoff(player, &[a0, 1]));
        }
    }
    assert_eq!(g.payoff(0, &[2, 0]), 0.5);
    // Canonical re-serialization is uniform.
    let re = parse_game(&serialize_game(&g)).unwrap();
    assert_eq!(re, g);
}

#[test]
fn actions_list_length_must_match_players() {
    let doc = json!({
        "players": 2, "actions": [2, 2, 2], "form": "dense",
        "payoffs": [[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0]],
    });
    assert!(matches!(
        parse_game(doc.to_string().as_bytes()),
        Err(IoError::Dimension(_))
    ));
}

#[test]
fn profile_files_round_trip() {
    let mixed = ProfileFile::Mixed(
        MixedProfile::new(vec![vec![0.25, 0.75], vec![0.5, 0.5]]).unwrap(),
    );
    let ku = ProfileFile::KUniform(
        KUniformProfile::new(3, vec![vec![0, 2, 2], vec![1, 1, 1]]).unwrap(),
    );
    let lifted = ProfileFile::Lifted {
        actions: 2,
        profile: LiftedPureProfile::new(vec![vec![0, 1], vec![1, 1]]).unwrap(),
    };
    for p in [mixed, ku, lifted] {
        let bytes = serialize_profile(&p);
        let parsed = parse_profile(&bytes).unwrap();
        assert_eq!(parsed, p);
        assert_eq!(serialize_profile(&parsed), bytes);
    }
}

#[test]
fn profile_files_use_one_based_actions() {
    let doc = json!({
        "kind": "k-uniform",
        "k": 2,
        "actions": 2,
        "multisets": [[1, 2], [2, 2]],
    });
    let parsed = parse_profile(doc.to_string().as_bytes()).unwrap();
    match parsed {
        ProfileFile::KUniform(p) => {
            assert_eq!(p.multisets(), &[vec![0, 1], vec![1, 1]]);
        }
        other => panic!("unexpected {other:?}"),
    }
    // 0 and m+1 are both out of range in 1-based files.
    let doc = json!({
        "kind": "k-uniform", "k": 1, "actions": 2, "multisets": [[0], [1]],
    });
    assert!(matches!(
        parse_profile(doc.to_string().as_bytes()),
        Err(IoError::Profile(_))
    ));
    let doc = json!({
        "kind": "lifted", "k": 1, "actions": 2, "populations": [[3], [1]],
    });
    assert!(matches!(
        parse_profile(doc.to_string().as_bytes()),
        Err(IoError::Profile(_))
    ));
}

#[test]
fn profile_file_validation_errors() {
    let doc = json!({"kind": "waveform"});
    assert!(matches!(
        parse_profile(doc.to_string().as_bytes()),
        Err(IoError::Field(_))
    ));
    let doc = json!({"kind": "mixed"});
    assert!(matches!(
        parse_profile(doc.to_string().as_bytes()),
        Err(IoError::Field(_))
    ));
    let doc = json!({"kind": "mixed", "strategies": [[0.9, 0.9]]});
    assert!(matches!(
        parse_profile(doc.to_string().as_bytes()),
        Err(IoError::Profile(_))
    ));
    // Declared k disagreeing with the data is a dimension error.
    let doc = json!({
        "kind": "k-uniform", "k": 3, "actions": 2, "multisets": [[1, 2], [1, 2]],
    });
    assert!(matches!(
        parse_profile(doc.to_string().as_bytes()),
        Err(IoError::Dimension(_))
    ));
}

#[test]
fn file_helpers_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let game_path = dir.path().join("g.json");
    save_game(&game_path, &matching()).unwrap();
    assert_eq!(load_game(&game_path).unwrap(), matching());

    let profile_path = dir.path().join("p.json");
    let p = ProfileFile::Mixed(MixedProfile::uniform(2, 2));
    save_profile(&profile_path, &p).unwrap();
    assert_eq!(load_profile(&profile_path).unwrap(), p);

    assert!(matches!(
        load_game(&dir.path().join("missing.json")),
        Err(IoError::File(_))
    ));
}
