//! The dense kernels on their own: matrix exponential, eigendecomposition
//! and the Riccati solver, each checked against a known answer.

use intermittent::numerics::{care_residual, eig, expm, matrix_from_rows, solve_care, Matrix};

fn main() -> intermittent::Result<()> {
    // Rotation generator: exp(θJ) is a rotation by θ.
    let j = matrix_from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]])?;
    let r = expm(&(&j * std::f64::consts::FRAC_PI_2))?;
    println!("exp(pi/2 J) =\n{r:.3}");

    // Companion matrix of (s + 1)(s + 2)(s + 3).
    let c = matrix_from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![-6.0, -11.0, -6.0]])?;
    let e = eig(&c)?;
    println!("companion eigenvalues: {:?}", e.values.iter().map(|v| format!("{:.6}", v.re)).collect::<Vec<_>>());
    println!("eigenvector conditioning: {:.3e}", e.conditioning);

    // Double integrator LQR.
    let a = matrix_from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]])?;
    let b = matrix_from_rows(&[vec![0.0], vec![1.0]])?;
    let q = Matrix::identity(2, 2);
    let rr = Matrix::identity(1, 1);
    let p = solve_care(&a, &b, &q, &rr)?;
    println!("Riccati solution =\n{p:.6}");
    println!("expected [[sqrt 3, 1], [1, sqrt 3]], sqrt 3 = {:.6}", 3f64.sqrt());
    println!("residual max = {:.2e}", care_residual(&a, &b, &q, &rr, &p)?.amax());
    Ok(())
}
