#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = bvalue::io::parse_curve_spec(text) {
            assert!(!grid.is_empty() && grid.len() <= bvalue::io::MAX_CURVE_POINTS);
        }
    }
});
