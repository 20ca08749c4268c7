#![no_main]

use libfuzzer_sys::fuzz_target;
use osclab::seqgen::parse_sequence;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(seq) = parse_sequence(s) {
            let first = seq.first_index();
            for n in first..first.saturating_add(seq.len().min(64)) {
                let _ = seq.get(n);
            }
        }
    }
});
