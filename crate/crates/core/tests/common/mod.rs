#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use vfarm::config::RunConfig;
use vfarm::econ::RateMode;
use vfarm::sweep::{self, Inputs, ScenarioRecord, SweepReport};

pub fn default_config_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../config/default.toml")
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn default_inputs() -> Inputs {
    let path = default_config_path();
    let text = std::fs::read_to_string(&path).unwrap();
    let config = RunConfig::load(&path).unwrap();
    Inputs::load(config, &text).unwrap()
}

/// Full default sweep, run once per test binary.
pub fn full_sweep() -> &'static SweepReport {
    static REPORT: OnceLock<SweepReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let inputs = default_inputs();
        let grid = sweep::build_grid(&inputs.config).unwrap();
        let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        sweep::run_sweep(&grid, &inputs, workers, RateMode::Fisher).unwrap()
    })
}

pub fn record<'a>(report: &'a SweepReport, id: &str) -> &'a ScenarioRecord {
    report.record(id).unwrap_or_else(|| panic!("no record {id}"))
}

pub fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}
