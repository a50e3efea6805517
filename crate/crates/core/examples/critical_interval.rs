//! Sweeps the spectral radius of the sampled error map for the simple
//! unstable plant and locates the critical intermittent interval for three
//! actual-to-nominal gain ratios.

use intermittent::analysis::{analyze, AnalysisOptions};
use intermittent::design::{design_controller, DesignWeights};
use intermittent::errorsys::assemble;
use intermittent::model::{simple_scenario, EventConfig};
use intermittent::numerics::Matrix;

fn main() -> intermittent::Result<()> {
    let weights = DesignWeights {
        qc: Matrix::identity(2, 2) * 3.0,
        rc: Matrix::identity(1, 1),
        qo: Matrix::identity(2, 2) * 100.0,
        ro: Matrix::identity(1, 1),
    };
    let event = EventConfig::default_for(2);
    for b in [0.8, 1.2, 1.7] {
        let scenario = simple_scenario(b, 1.0)?;
        let design = design_controller(scenario.nominal(), &weights)?;
        let es = assemble(&scenario, &design)?;
        let (sweep, prediction) = analyze(&es, &event, &AnalysisOptions::default())?;
        print!("b = {b}: {} sweep crossings", sweep.crossing_count());
        match prediction {
            Some(p) => println!(
                ", delta_crit = {:.6} s, lambda = {:.4}, class {}, second |lambda| = {:.3}, gamma = {:?}",
                p.delta_crit, p.lambda_crit, p.cycle_class, p.second_magnitude, p.gamma
            ),
            None => println!(", no crossing"),
        }
    }
    Ok(())
}
