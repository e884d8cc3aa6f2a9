#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spec) = kuniform::parse_experiment(data) {
        let bytes = serde_json::to_vec(&spec).expect("validated spec serializes");
        kuniform::parse_experiment(&bytes).expect("round-tripped spec parses");
    }
});
