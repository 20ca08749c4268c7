#![no_main]

use libfuzzer_sys::fuzz_target;
use osclab::orbitpoly::RationalPoly;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = RationalPoly::from_json(s) {
            assert_eq!(RationalPoly::from_json(&p.to_json()).expect("round trip"), p);
        }
    }
});
