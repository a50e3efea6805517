//! Simulates event-driven intermittent control of the simple plant with an
//! over-estimated input gain and compares the measured limit cycle with the
//! eigenstructure prediction.

use intermittent::analysis::{analyze, AnalysisOptions};
use intermittent::design::{design_controller, DesignWeights};
use intermittent::errorsys::assemble;
use intermittent::model::{simple_scenario, EventConfig};
use intermittent::numerics::{Matrix, Vector};
use intermittent::simulator::{attach_eigen_coordinates, measure_cycle, simulate_intermittent, SimulationConfig};

fn main() -> intermittent::Result<()> {
    let b: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.8);
    let weights = DesignWeights {
        qc: Matrix::identity(2, 2) * 3.0,
        rc: Matrix::identity(1, 1),
        qo: Matrix::identity(2, 2) * 100.0,
        ro: Matrix::identity(1, 1),
    };
    let scenario = simple_scenario(b, 1.0)?;
    let design = design_controller(scenario.nominal(), &weights)?;
    let es = assemble(&scenario, &design)?;
    let event = EventConfig::default_for(2);
    let (_, prediction) = analyze(&es, &event, &AnalysisOptions::default())?;
    let prediction = prediction.expect("the sweep should cross the unit circle");

    let cfg = SimulationConfig::new(Vector::from_vec(vec![0.0, 0.1]), 60.0);
    let trace = simulate_intermittent(&scenario, &design, &event, &cfg)?;
    let trace = attach_eigen_coordinates(&trace, &prediction.spectrum)?;
    let cycle = measure_cycle(&trace, 0.3)?;

    println!("b = {b}: {} events, status {:?}", trace.events.len(), trace.status);
    println!(
        "predicted: class {}, period {:.4} s, gamma {:.4}",
        prediction.cycle_class,
        prediction.period.unwrap_or(f64::NAN),
        prediction.gamma.unwrap_or(f64::NAN)
    );
    println!(
        "measured:  period {:.4} s, amplitude {:.4}, interval spread {:.2}%, alternating {}",
        cycle.period,
        cycle.amplitude,
        100.0 * cycle.relative_spread,
        cycle.alternating
    );
    let chi = trace.chi.as_ref().unwrap();
    for &step in trace.event_steps.iter().rev().take(5).rev() {
        let others = chi[step].iter().skip(1).map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        println!("  t = {:7.3}  |chi_k1| = {:.4}  |others| = {:.2e}", trace.times[step], chi[step][0].norm(), others);
    }
    Ok(())
}
