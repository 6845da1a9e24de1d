#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = bvalue::io::parse_scenario(text) {
            assert!(s.validate().is_ok());
        }
    }
});
