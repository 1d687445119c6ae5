#![no_main]

use dpscd::data::{parse_libsvm, parse_libsvm_with, LibsvmOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Any input must yield a dataset or an error, never a panic.
    if let Ok(d) = parse_libsvm(data) {
        assert_eq!(d.labels().len(), d.n_examples());
        let fixed = LibsvmOptions {
            feature_count: Some(d.n_features()),
        };
        assert!(parse_libsvm_with(data, fixed).is_ok());
    }
});
