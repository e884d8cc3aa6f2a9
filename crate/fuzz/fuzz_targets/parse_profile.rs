#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(profile) = kuniform::parse_profile(data) {
        let canonical = kuniform::serialize_profile(&profile);
        let reparsed =
            kuniform::parse_profile(&canonical).expect("canonical profile form parses");
        assert_eq!(kuniform::serialize_profile(&reparsed), canonical);
    }
});
