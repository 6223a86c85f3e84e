#![no_main]

use libfuzzer_sys::fuzz_target;
use readout_core::io::{channel_to_json, parse_channel, parse_channel_unchecked};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_channel_unchecked(text);
    if let Ok(ch) = parse_channel(text) {
        let again = parse_channel(&channel_to_json(&ch).to_string()).expect("emitted channel parses");
        assert_eq!(ch, again);
        let _ = readout_core::readout_model(&ch);
    }
});
