//! Loads a scenario file and writes the same CSV/JSON outputs as the `ic`
//! binary into a directory (default `out/example`).

use intermittent::cli::{run_analyze, run_simulate};
use intermittent::scenario::Scenario;
use std::path::{Path, PathBuf};

fn main() -> intermittent::Result<()> {
    let mut args = std::env::args().skip(1);
    let file = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/simple_b1.2.json"));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/example"));
    let scenario = Scenario::load(&file)?;
    let report = run_analyze(&scenario, &out)?;
    let summary = run_simulate(&scenario, &out)?;
    println!("{}: {} (reason: {:?})", scenario.name, report.cycle_class, report.reason);
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    println!("files in {}", out.display());
    Ok(())
}
