#![no_main]

use dpscd::data::{parse_libsvm, parse_libsvm_with, write_libsvm, LibsvmOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(first) = parse_libsvm(data) else {
        return;
    };
    let mut text = Vec::new();
    write_libsvm(&first, &mut text).expect("writing to memory succeeds");
    let options = LibsvmOptions {
        feature_count: Some(first.n_features()),
    };
    let second = parse_libsvm_with(text.as_slice(), options).expect("written output parses");
    assert_eq!(first.n_examples(), second.n_examples());
    for i in 0..first.n_examples() {
        assert_eq!(first.label(i).to_bits(), second.label(i).to_bits());
        let a: Vec<_> = first.example(i).iter().collect();
        let b: Vec<_> = second.example(i).iter().collect();
        assert_eq!(a, b);
    }
});
