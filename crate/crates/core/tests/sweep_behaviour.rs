mod common;

use proptest::prelude::*;
use sha2::{Digest, Sha256};
use vfarm::config::Site;
use vfarm::econ::RateMode;
use vfarm::sweep::{self, ScenarioSpec};

fn spec() -> impl Strategy<Value = ScenarioSpec> {
    (0usize..3, any::<bool>(), any::<u32>(), any::<u32>(), any::<u32>()).prop_map(|(s, insulated, ppfd, t_in, co2)| ScenarioSpec {
        site: Site::ALL[s],
        insulated,
        ppfd,
        t_in,
        co2,
    })
}

proptest! {
    #[test]
    fn ids_round_trip(s in spec()) {
        prop_assert_eq!(s.id().parse::<ScenarioSpec>().unwrap(), s);
    }

    #[test]
    fn arbitrary_strings_never_panic(s in "\\PC{0,24}") {
        if let Ok(spec) = s.parse::<ScenarioSpec>() {
            prop_assert_eq!(spec.id(), s);
        }
    }
}

fn summary_digest(report: &sweep::SweepReport) -> String {
    let tmp = tempfile::tempdir().unwrap();
    sweep::emit_reports(report, tmp.path(), 90.0).unwrap();
    let bytes = std::fs::read(tmp.path().join("summary.csv")).unwrap();
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let inputs = common::default_inputs();
    let grid = sweep::build_grid(&inputs.config).unwrap();
    let grid: Vec<_> = grid.into_iter().step_by(7).collect();
    let one = sweep::run_sweep(&grid, &inputs, 1, RateMode::Fisher).unwrap();
    let four = sweep::run_sweep(&grid, &inputs, 4, RateMode::Fisher).unwrap();
    assert_eq!(one.records, four.records);
    assert_eq!(one.sensitivity, four.sensitivity);
    assert_eq!(one.breakeven, four.breakeven);
    assert_eq!(one.daily, four.daily);
    assert_eq!(summary_digest(&one), summary_digest(&four));
    assert_eq!(one.metadata.config_hash, four.metadata.config_hash);
}

#[test]
fn failing_scenarios_do_not_touch_the_others() {
    let mut inputs = common::default_inputs();
    let grid: Vec<ScenarioSpec> = ["T_I_100_24_900", "S_O_250_20_400", "D_I_400_28_1400", "S_I_100_28_1400"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let clean = sweep::run_sweep(&grid, &inputs, 2, RateMode::Fisher).unwrap();
    inputs.supply.remove("shanghai");
    let broken = sweep::run_sweep(&grid, &inputs, 2, RateMode::Fisher).unwrap();
    assert_eq!(broken.errors.len(), 2);
    assert!(broken.errors.iter().all(|e| e.spec.site == Site::Shanghai && e.kind == "config"));
    let kept: Vec<_> = clean.records.iter().filter(|r| r.spec.site != Site::Shanghai).cloned().collect();
    assert_eq!(broken.records, kept);
}

#[test]
fn config_hash_tracks_inputs() {
    let path = common::default_config_path();
    let text = std::fs::read_to_string(&path).unwrap();
    let config = vfarm::config::RunConfig::load(&path).unwrap();
    let a = sweep::Inputs::load_for(config.clone(), &text, &[Site::Dubai]).unwrap();
    let b = sweep::Inputs::load_for(config.clone(), &text, &[Site::Dubai]).unwrap();
    let c = sweep::Inputs::load_for(config, &format!("{text}\n# edited\n"), &[Site::Dubai]).unwrap();
    assert_eq!(a.config_hash, b.config_hash);
    assert_ne!(a.config_hash, c.config_hash);
    assert_eq!(a.config_hash.len(), 64);
}
