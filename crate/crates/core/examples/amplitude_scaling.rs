//! The predicted cycle amplitude is proportional to the event threshold.
//! Runs the simple plant at three thresholds and compares the predicted
//! event-time amplitude with the simulated one.

use intermittent::cli::simulate_scenario;
use intermittent::scenario::{Scenario, SweepParam};
use std::path::Path;

fn main() -> intermittent::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/simple_b0.8.json");
    let base = Scenario::load(&path)?;
    println!("{:>6} {:>10} {:>10} {:>12}", "q_t", "gamma", "|chi| late", "peak |x|");
    for q in [0.05, 0.1, 0.2, 0.4] {
        let run = simulate_scenario(&base.with_param(SweepParam::QT, q)?)?;
        let s = run.summary;
        println!(
            "{q:>6.2} {:>10.5} {:>10.5} {:>12.5}",
            s.gamma.unwrap_or(f64::NAN),
            s.chi_k1_late.unwrap_or(f64::NAN),
            s.measured_amplitude.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
