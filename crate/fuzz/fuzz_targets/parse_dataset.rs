#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(ds) = bvalue::io::parse_dataset(text) {
            let labels: Vec<String> = ds.labels().map(str::to_string).collect();
            assert!(labels.len() >= 2);
            for l in &labels {
                let _ = ds.summary(l);
            }
        }
    }
});
