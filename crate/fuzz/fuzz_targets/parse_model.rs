#![no_main]

use libfuzzer_sys::fuzz_target;
use readout_core::io::{model_to_json, parse_model};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = parse_model(text) {
        let again = parse_model(&model_to_json(&m).to_string()).expect("emitted model parses");
        assert_eq!(m, again);
    }
});
