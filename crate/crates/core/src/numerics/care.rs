use super::{
    complex_schur, eig, ensure_finite, ensure_shape, ensure_square, is_symmetric, min_symmetric_eigenvalue,
    reorder_schur, to_complex, Matrix,
};
use crate::error::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-9;

/// Residual `AᵀP + PA − PBR⁻¹BᵀP + Q`.
pub fn care_residual(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix, p: &Matrix) -> Result<Matrix> {
    let g = gain_matrix(b, r)?;
    Ok(a.transpose() * p + p * a - p * &g * p + q)
}

fn gain_matrix(b: &Matrix, r: &Matrix) -> Result<Matrix> {
    let chol = r
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Design("R is not positive definite".into()))?;
    Ok(b * chol.solve(&b.transpose()))
}

/// Stabilizing solution of `AᵀP + PA − PBR⁻¹BᵀP + Q = 0` from the stable
/// invariant subspace of the Hamiltonian matrix.
pub fn solve_care(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix) -> Result<Matrix> {
    let n = ensure_square(a, "solve_care A")?;
    let m = b.ncols();
    ensure_shape(b, n, m, "solve_care B")?;
    ensure_shape(q, n, n, "solve_care Q")?;
    ensure_shape(r, m, m, "solve_care R")?;
    for (mat, name) in [(a, "A"), (b, "B"), (q, "Q"), (r, "R")] {
        ensure_finite(mat, name)?;
    }
    if !is_symmetric(r, 1e-12) || min_symmetric_eigenvalue(r) <= 0.0 {
        return Err(Error::Design("R must be symmetric positive definite".into()));
    }
    let qscale = q.amax().max(1.0);
    if !is_symmetric(q, 1e-12) || min_symmetric_eigenvalue(q) < -1e-12 * qscale {
        return Err(Error::Design("Q must be symmetric positive semi-definite".into()));
    }
    let g = gain_matrix(b, r)?;

    let mut h = Matrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-&g));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let mut schur = complex_schur(&to_complex(&h))?;
    let axis_tol = 1e-10 * h.norm().max(1.0);
    if (0..2 * n).any(|i| schur.t[(i, i)].re.abs() <= axis_tol) {
        return Err(Error::Design(
            "Hamiltonian has imaginary-axis eigenvalues (pair not stabilizable or not detectable)".into(),
        ));
    }
    let stable = reorder_schur(&mut schur, |l| l.re < 0.0);
    if stable != n {
        return Err(Error::Design(format!("expected {n} stable Hamiltonian eigenvalues, found {stable}")));
    }
    let u1 = schur.z.view((0, 0), (n, n)).into_owned();
    let u2 = schur.z.view((n, 0), (n, n)).into_owned();
    let pt = u1
        .transpose()
        .lu()
        .solve(&u2.transpose())
        .ok_or_else(|| Error::Design("stable subspace basis is singular".into()))?;
    let pc = pt.transpose();
    let p0 = pc.map(|x| x.re);
    let mut p = (&p0 + p0.transpose()) * 0.5;

    let tol = |p: &Matrix| RESIDUAL_TOL * (1.0 + p.norm() * p.norm());
    let mut res = (a.transpose() * &p + &p * a - &p * &g * &p + q).norm();
    for _ in 0..3 {
        if res <= 1e-3 * tol(&p) {
            break;
        }
        let Some(next) = newton_step(a, &g, &p, q) else { break };
        let next_res = (a.transpose() * &next + &next * a - &next * &g * &next + q).norm();
        if !(next_res < res) {
            break;
        }
        p = next;
        res = next_res;
    }
    if !(res <= tol(&p)) {
        return Err(Error::numerical("CARE residual", res));
    }
    let closed = a - &g * &p;
    let spectrum = eig(&closed)?;
    if spectrum.values.iter().any(|l| l.re >= 0.0) {
        return Err(Error::Design("CARE solution does not stabilize the closed loop".into()));
    }
    Ok(p)
}

/// One Newton correction: solve `(A − GP)ᵀX + X(A − GP) = −Res(P)` by Kronecker vectorization.
fn newton_step(a: &Matrix, g: &Matrix, p: &Matrix, q: &Matrix) -> Option<Matrix> {
    let n = a.nrows();
    let ak = a - g * p;
    let res = a.transpose() * p + p * a - p * g * p + q;
    let id = Matrix::identity(n, n);
    let akt = ak.transpose();
    let kron = id.kronecker(&akt) + akt.kronecker(&id);
    let rhs = -Matrix::from_iterator(n * n, 1, res.iter().copied());
    let x = kron.lu().solve(&rhs)?;
    let x = Matrix::from_iterator(n, n, x.iter().copied());
    let next = p + (&x + x.transpose()) * 0.5;
    Some(next)
}
