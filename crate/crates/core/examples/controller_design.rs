//! LQ state feedback and observer design for the bundled three-link model,
//! with the separation principle checked on the joint loop.

use intermittent::design::{design_controller, nominal_closed_loop, DesignWeights};
use intermittent::model::three_link_model;
use intermittent::numerics::{eig, Matrix};

fn main() -> intermittent::Result<()> {
    let model = three_link_model()?;
    let open = eig(model.a())?;
    println!("open-loop poles: {}", fmt(&open.values));

    let mut qc = Matrix::identity(6, 6);
    for i in 3..6 {
        qc[(i, i)] = 1e4;
    }
    let mut qo = Matrix::identity(6, 6);
    for i in 0..3 {
        qo[(i, i)] = 1e4;
    }
    let weights = DesignWeights { qc, rc: Matrix::identity(3, 3) * 0.01, qo, ro: Matrix::identity(3, 3) };
    let d = design_controller(&model, &weights)?;
    println!("controller poles: {}", fmt(&eig(&d.a_c_hat)?.values));
    println!("observer poles:   {}", fmt(&eig(&d.a_o_hat)?.values));
    println!("joint loop poles: {}", fmt(&eig(&nominal_closed_loop(&model, &d))?.values));
    println!("feedback gain =\n{:.3}", d.k_hat);
    Ok(())
}

fn fmt(v: &[intermittent::numerics::C64]) -> String {
    v.iter()
        .map(|z| if z.im == 0.0 { format!("{:.3}", z.re) } else { format!("{:.3}{:+.3}i", z.re, z.im) })
        .collect::<Vec<_>>()
        .join(", ")
}
