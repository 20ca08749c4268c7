#![no_main]

use libfuzzer_sys::fuzz_target;
use osclab::torus::parse_flow;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(doc) = parse_flow(s) {
            assert_eq!(doc.start().len(), doc.flow.dim());
        }
    }
});
