#![no_main]

use dpscd_bench::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // Anything that parses must also pass validation.
        if let Ok(config) = text.parse::<ExperimentConfig>() {
            config.validate().expect("parsed configs are valid");
        }
    }
});
