use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vfarm::config::RunConfig;
use vfarm::econ::RateMode;
use vfarm::sweep::{self, Inputs, ScenarioSpec, SweepReport};
use vfarm::Error;

#[derive(Parser)]
#[command(name = "vfarm", version, about = "Vertical-farm energy, cost and carbon scenario simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the scenario grid and write reports
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// worker threads (default: available cores)
        #[arg(long)]
        workers: Option<usize>,
        /// run a single scenario, e.g. T_I_100_24_1400
        #[arg(long)]
        scenario: Option<String>,
        /// use the real-rate formula exactly as printed in the source study
        #[arg(long)]
        strict_paper: bool,
    },
    /// Recompute the distance-correlation table of an existing report
    Sensitivity {
        #[arg(long)]
        report: PathBuf,
    },
    /// Recompute the electricity break-even table of an existing report
    Breakeven {
        #[arg(long)]
        report: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_SCENARIO: u8 = 2;

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_SCENARIO })
}

fn run(config_path: PathBuf, out: PathBuf, workers: Option<usize>, scenario: Option<String>, strict_paper: bool) -> ExitCode {
    let text = match std::fs::read_to_string(&config_path) {
        Ok(t) => t,
        Err(e) => return fail(Error::Config(format!("{}: {e}", config_path.display()))),
    };
    let config = match RunConfig::load(&config_path) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let grid = match scenario {
        Some(id) => match id.parse::<ScenarioSpec>() {
            Ok(s) => vec![s],
            Err(e) => return fail(e),
        },
        None => match sweep::build_grid(&config) {
            Ok(g) => g,
            Err(e) => return fail(e),
        },
    };
    let sites: Vec<_> = grid.iter().map(|s| s.site).collect();
    let inputs = match Inputs::load_for(config, &text, &sites) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let mode = if strict_paper { RateMode::StrictPaper } else { inputs.config.econ.rate_mode };
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let report = match sweep::run_sweep(&grid, &inputs, workers, mode) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = sweep::emit_reports(&report, &out, inputs.model.geometry.crop_area) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_SCENARIO);
    }
    println!(
        "{} scenarios, {} failed, {:.1} s, report in {}",
        grid.len(),
        report.errors.len(),
        report.metadata.elapsed_s,
        out.display()
    );
    for e in &report.errors {
        eprintln!("{}: {} error: {}", e.id, e.kind, e.message);
    }
    if report.errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SCENARIO)
    }
}

fn load_report(dir: &Path) -> Result<SweepReport, ExitCode> {
    SweepReport::load(dir).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_CONFIG)
    })
}

fn sensitivity(dir: PathBuf) -> ExitCode {
    let report = match load_report(&dir) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let table = match sweep::sensitivity(&report.records) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    if let Err(e) = sweep::write_sensitivity(&dir.join("sensitivity.csv"), &table) {
        return fail(e);
    }
    println!("{:<12} {:<16} {:>6}", "input", "outcome", "rho");
    for e in &table {
        println!("{:<12} {:<16} {:>6.3}", e.input, e.outcome, e.rho);
    }
    ExitCode::SUCCESS
}

fn breakeven(dir: PathBuf) -> ExitCode {
    let report = match load_report(&dir) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let rows = match sweep::breakeven_table(&report.records, &report.settings) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = sweep::write_breakeven(&dir.join("breakeven.csv"), &rows) {
        return fail(e);
    }
    let cell = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
    println!("{:<10} {:>4} {:>6} {:>7} {:>7} {:>7}", "location", "t_in", "co2", "c_el", "c_el400", "c_el100");
    for r in &rows {
        println!(
            "{:<10} {:>4} {:>6} {:>7.3} {:>7} {:>7}",
            r.location.to_string(),
            r.t_in,
            r.co2,
            r.c_el,
            cell(r.c_el400),
            cell(r.c_el100)
        );
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, workers, scenario, strict_paper } => run(config, out, workers, scenario, strict_paper),
        Command::Sensitivity { report } => sensitivity(report),
        Command::Breakeven { report } => breakeven(report),
    }
}
