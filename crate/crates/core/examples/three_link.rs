//! Three-link standing model with the input gain over- and underestimated by
//! 10%: analysis and simulation side by side.

use intermittent::cli::simulate_scenario;
use intermittent::scenario::Scenario;
use std::path::Path;

fn main() -> intermittent::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for name in ["three_link_b0.9", "three_link_b1.1"] {
        let run = simulate_scenario(&Scenario::load(&dir.join(format!("{name}.json")))?)?;
        let s = run.summary;
        println!(
            "{name}: {} delta_crit {:.4} s, period {:.4} s predicted / {:.4} s measured, alternating {:?}",
            s.cycle_class,
            s.delta_crit.unwrap_or(f64::NAN),
            s.predicted_period.unwrap_or(f64::NAN),
            s.measured_period.unwrap_or(f64::NAN),
            s.alternating
        );
    }
    Ok(())
}
