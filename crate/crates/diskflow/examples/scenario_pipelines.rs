//! The packaged pipelines behind the command-line runner: a config picks a
//! scenario, the pipeline runs the flow, applies its checks, and writes a
//! self-contained artifact directory (config, snapshots, series, report,
//! human summary). This drives two pipelines at desk scale and shows what
//! lands on disk.

use diskflow::config::{canonical, Scenario};
use diskflow::report::render_summary;
use diskflow::scenario::run_scenario;

fn main() {
    let dir = tempfile::tempdir().unwrap();

    let mut stationary = canonical(Scenario::Stationary);
    stationary.grid.n = 128;
    stationary.horizon = 0.2;
    let mut comparison = canonical(Scenario::ComparisonDemo);
    comparison.grid.n = 128;
    comparison.horizon = 0.1;

    for config in [stationary, comparison] {
        let out = dir.path().join(config.scenario.name());
        let outcome = run_scenario(&config, &out, 1).unwrap();
        print!("{}", render_summary(&outcome.report));
        let mut names: Vec<String> = std::fs::read_dir(&outcome.out_dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        println!("artifacts: {}", names.join(", "));
        println!();
    }
    println!("(the `diskflow` binary wraps exactly this: --scenario NAME or --config PATH,");
    println!(" --out DIR / DISKFLOW_OUTPUT_ROOT for placement, exit 0 only if checks pass)");
}
