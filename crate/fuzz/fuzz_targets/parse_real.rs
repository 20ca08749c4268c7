#![no_main]

use libfuzzer_sys::fuzz_target;
use osclab::real::Real;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = s.parse::<Real>() {
            // printing and reparsing must give the same number
            let again: Real = r.to_string().parse().expect("display reparses");
            assert_eq!(again, r);
        }
    }
});
