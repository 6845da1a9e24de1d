#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = bvalue::report::parse_report(text) {
            let again = bvalue::report::parse_report(&r.to_json()).expect("re-parse");
            assert_eq!(again.to_json(), r.to_json());
        }
    }
});
