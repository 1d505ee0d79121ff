mod common;

use eigenlocus::experiment::{run_experiment, ExperimentConfig, Mode, RunSet};
use eigenlocus::Options;

const NAMES: [&str; 6] = [
    "example-one",
    "example-two",
    "homogeneous",
    "skewed-weak-dual",
    "two-point",
    "three-class",
];

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&common::configs_dir().join(format!("{name}.json"))).unwrap()
}

#[test]
fn every_bundled_config_validates() {
    for name in NAMES {
        let cfg = load(name);
        assert_eq!(cfg.name, name);
    }
    assert_eq!(load("skewed-weak-dual").mode, Mode::WeakDual);
    assert_eq!(load("three-class").mode, Mode::Multiclass);
    assert_eq!(load("example-one").repeats, 5);
}

#[test]
fn two_point_config_recovers_the_closed_form() {
    let out = run_experiment(&load("two-point"), &Options::default()).unwrap();
    let RunSet::Binary { runs, .. } = &out.summary.results else { panic!() };
    let r = &runs[0];
    assert!((r.tau[0] - 1.0).abs() < 1e-8 && r.tau[1].abs() < 1e-12);
    assert!(r.tau0.abs() < 1e-8);
    assert!(r.diagnostics_pass);
    assert_eq!(r.svm_error, 0.0);
}

#[test]
fn output_files_are_byte_identical_across_runs() {
    let mut cfg = load("example-two");
    cfg.repeats = 1;
    cfg.n_test = 2000;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&cfg, &Options::default()).unwrap().write(a.path()).unwrap();
    run_experiment(&cfg, &Options::default()).unwrap().write(b.path()).unwrap();
    for f in ["summary.json", "scatter_seed1.csv", "lines_seed1.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}
