//! Scenario runner: pick a canned scenario or load a TOML config, run the
//! pipeline, print the summary, and exit 0 only if every check passed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use diskflow::config::{canonical, resolve_output_root, RunConfig, Scenario};
use diskflow::report::render_summary;
use diskflow::scenario::run_scenario;

#[derive(Parser)]
#[command(
    name = "diskflow",
    version,
    about = "equivariant disk-to-sphere heat flow scenarios"
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Scenario name (stationary, global-infinity, finite-time-blowup,
    /// comparison-demo, chain-audit, sweep); overrides the config.
    #[arg(long, value_name = "NAME")]
    scenario: Option<String>,
    /// Output root; overrides the config and the environment default.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Parallel workers for sweep cells.
    #[arg(long, value_name = "COUNT", default_value_t = 1)]
    jobs: usize,
    /// Seed for the randomized audits; overrides the config.
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let scenario_override = cli
        .scenario
        .as_deref()
        .map(|s| s.parse::<Scenario>())
        .transpose()
        .map_err(|e| e.to_string())?;
    let mut config = match (&cli.config, scenario_override) {
        (Some(path), _) => RunConfig::load(path).map_err(|e| e.to_string())?,
        (None, Some(scenario)) => canonical(scenario),
        (None, None) => return Err("pass --config PATH or --scenario NAME".to_string()),
    };
    if let Some(scenario) = scenario_override {
        config.scenario = scenario;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate().map_err(|e| e.to_string())?;

    let root = resolve_output_root(cli.out.as_deref(), &config);
    let dir = root.join(config.scenario.name());
    let outcome = run_scenario(&config, &dir, cli.jobs).map_err(|e| e.to_string())?;
    print!("{}", render_summary(&outcome.report));
    println!("artifacts: {}", outcome.out_dir.display());
    Ok(outcome.passed)
}
