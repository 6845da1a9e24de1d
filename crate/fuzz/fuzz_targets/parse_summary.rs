#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = bvalue::io::parse_summary(text) {
            assert!(s.n() >= 1 && s.mean().is_finite() && s.sd() >= 0.0);
        }
    }
});
