//! A second-order actuator the design ignores: the continuous observer-based
//! loop goes unstable while the intermittent loop settles into a cycle.

use intermittent::cli::simulate_scenario;
use intermittent::scenario::Scenario;
use std::path::Path;

fn main() -> intermittent::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/neglected_dynamics.json");
    let run = simulate_scenario(&Scenario::load(&path)?)?;
    let s = &run.summary;
    println!("continuous loop: largest real part {:+.4}", s.continuous_max_real_eig);
    match s.continuous_diverged_at {
        Some(t) => println!("continuous run left the bounded region at t = {t:.2} s"),
        None => println!("continuous final |y| = {:.3e}", run.continuous.y.last().map_or(0.0, |y| y.amax())),
    }
    println!(
        "intermittent: class {}, predicted period {:.4} s, measured {:.4} s, {} events, converged {}",
        s.cycle_class,
        s.predicted_period.unwrap_or(f64::NAN),
        s.measured_period.unwrap_or(f64::NAN),
        s.event_count,
        s.converged
    );
    Ok(())
}
