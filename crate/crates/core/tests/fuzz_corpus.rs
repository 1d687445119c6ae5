//! Replays the checked-in fuzz corpus through the LIBSVM parser so the
//! seeds stay exercised without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

use dpscd::data::{parse_libsvm, parse_libsvm_with, write_libsvm, LibsvmOptions};

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus for {target}");
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn parse_corpus_outcomes() {
    for (name, bytes) in corpus("parse_libsvm") {
        let parsed = parse_libsvm(bytes.as_slice());
        let should_parse = matches!(
            name.as_str(),
            "basic" | "blank_lines_crlf" | "exponents_and_zeros" | "huge_index"
        );
        assert_eq!(parsed.is_ok(), should_parse, "{name}: {parsed:?}");
    }
}

#[test]
fn roundtrip_corpus() {
    for (name, bytes) in corpus("libsvm_roundtrip") {
        let first = parse_libsvm(bytes.as_slice()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut text = Vec::new();
        write_libsvm(&first, &mut text).unwrap();
        let options = LibsvmOptions {
            feature_count: Some(first.n_features()),
        };
        let second = parse_libsvm_with(text.as_slice(), options).unwrap();
        assert_eq!(first.n_examples(), second.n_examples(), "{name}");
        for i in 0..first.n_examples() {
            assert_eq!(first.label(i).to_bits(), second.label(i).to_bits(), "{name}");
            assert_eq!(
                first.example(i).iter().collect::<Vec<_>>(),
                second.example(i).iter().collect::<Vec<_>>(),
                "{name}"
            );
        }
    }
}
