#![no_main]

use libfuzzer_sys::fuzz_target;
use readout_core::io::{parse_state, StateFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rho) = parse_state(text) {
        let emitted = serde_json::to_string(&StateFile::from_density(&rho)).unwrap();
        assert_eq!(parse_state(&emitted).expect("emitted state parses"), rho);
    }
});
