#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Any input must either parse or return an error — never panic. When it
    // parses, the canonical serialization must be a fixed point of
    // parse → serialize.
    if let Ok(game) = kuniform::parse_game(data) {
        let canonical = kuniform::serialize_game(&game);
        let reparsed = kuniform::parse_game(&canonical).expect("canonical game form parses");
        assert_eq!(kuniform::serialize_game(&reparsed), canonical);
    }
});
