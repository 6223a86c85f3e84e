#![no_main]

use libfuzzer_sys::fuzz_target;
use readout_core::io::parse_counts;
use readout_core::sampling::frequencies;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(counts) = parse_counts(text) {
        if let Ok(z) = frequencies(&counts) {
            assert_eq!(z.len(), counts.len());
        }
    }
});
