#![no_main]

use libfuzzer_sys::fuzz_target;
use readout_core::io::parse_probabilities;
use readout_core::sampling::sample_counts;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(z) = parse_probabilities(text) {
        if let Ok(counts) = sample_counts(&z, 1000, 0) {
            assert_eq!(counts.iter().sum::<u64>(), 1000);
        }
    }
});
