//! Assembles the error system for the neglected-dynamics plant and prints
//! its block structure and the event-to-event map at a few intervals.

use intermittent::design::{design_controller, DesignWeights};
use intermittent::errorsys::assemble;
use intermittent::model::neglected_dynamics_scenario;
use intermittent::numerics::{eig, Matrix};

fn main() -> intermittent::Result<()> {
    let scenario = neglected_dynamics_scenario(10.0, 0.5, 1.0)?;
    let mut qo = Matrix::identity(2, 2);
    qo[(0, 0)] = 1e6;
    let weights = DesignWeights {
        qc: Matrix::identity(2, 2) * 100.0,
        rc: Matrix::identity(1, 1),
        qo,
        ro: Matrix::identity(1, 1),
    };
    let design = design_controller(scenario.nominal(), &weights)?;
    let es = assemble(&scenario, &design)?;
    let (n, no, nh) = es.block_dims;
    println!("plant {n} states, observer error {no}, hold error {nh}; reduced map is {0}x{0}", es.reduced_dim());
    println!("state map =\n{:.0}", es.state_map);
    for delta in [0.5, 1.0, 2.0, 2.5, 3.0] {
        let eigs = eig(&es.phi_bar(delta)?)?;
        let lead = eigs.values[0];
        println!("delta = {delta:.1}: spectral radius {:.4}, leading eigenvalue {lead:.4}", eigs.spectral_radius());
    }
    Ok(())
}
