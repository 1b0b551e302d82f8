#![allow(dead_code)]

use std::path::Path;
use std::process::Command;

use rand::Rng;

use rpens_core::RngSeed;
use rpens_harness::config::{DataSource, ExperimentConfig, MethodSpec, SCHEMA_VERSION};
use rpens_harness::synthetic::{CovarianceSpec, SyntheticModel, SyntheticSpec};

pub fn spec(model: SyntheticModel, p: usize, pi_0: f64, delta: f64) -> SyntheticSpec {
    SyntheticSpec { model, p, pi_0, delta: Some(delta), bayes_risk: None, support: 3, covariance: CovarianceSpec::Identity }
}

pub fn synthetic_config(
    spec: SyntheticSpec,
    n_train: usize,
    n_test: usize,
    repetitions: usize,
    roster: Vec<MethodSpec>,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        master_seed: RngSeed(seed),
        n_train,
        n_test,
        repetitions,
        source: DataSource::Synthetic { spec },
        roster,
        record_timings: false,
        threads: None,
    }
}

/// A file with the layout of the seizure recognition table: an identifier
/// column, 178 integer readings and a label in 1..=5, 2300 rows per label.
pub fn fake_epilepsy_csv(seed: u64) -> String {
    let mut rng = RngSeed(seed).rng();
    let mut out = String::from("\"\"");
    for j in 1..=178 {
        out.push_str(&format!(",X{j}"));
    }
    out.push_str(",y\n");
    for i in 0..11500 {
        let label = 1 + i % 5;
        out.push_str(&format!("X{}.V1.{}", 1 + i % 23, i));
        let shift = if label == 1 { 40 } else { 0 };
        for _ in 0..178 {
            let v: i32 = rng.random_range(-200..200) + shift;
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{label}\n"));
    }
    out
}

pub fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn rpens(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_rpens")).args(args).output().expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}
