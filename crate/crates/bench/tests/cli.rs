//! Exit codes and outputs of the `bench` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("experiment.cfg");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = "\
examples = 160
features = 4
algorithms = sdca, dpscd
epsilons = 1
lambda = 0.01
epochs = 2
scales = 0.1, 1
batch_sizes = 5
seeds = 2
";

#[test]
fn successful_run_writes_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let res = bench(&[
        "run",
        "--config",
        &cfg,
        "--out-dir",
        out.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    for name in ["tradeoff.csv", "convergence.csv", "lc_sweep.csv"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert!(text.starts_with("algorithm,epsilon,"), "{name}");
        assert!(text.lines().next().unwrap().ends_with("seed_3,seed_4"), "{name}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(bench(&[]).status.code(), Some(2));
    assert_eq!(bench(&["run"]).status.code(), Some(2));
    assert_eq!(bench(&["run", "--config", "x", "--bogus"]).status.code(), Some(2));
    assert_eq!(bench(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seeds = 2\nfrobnicate = 1\n");
    let res = bench(&["run", "--config", &cfg]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("line 2") && stderr.contains("frobnicate"), "{stderr}");

    let cfg = write_config(dir.path(), SMALL);
    let res = bench(&["run", "--config", &cfg, "--epsilons", "-1"]);
    assert_eq!(res.status.code(), Some(2));
    let res = bench(&["run", "--config", &cfg, "--algorithms", "adam"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.cfg");
    let res = bench(&["run", "--config", missing.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));

    let cfg = write_config(dir.path(), "dataset = absent.svm\n");
    let res = bench(&["run", "--config", &cfg]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        dpscd_bench::ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
