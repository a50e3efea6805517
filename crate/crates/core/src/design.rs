//! Linear-quadratic controller and observer design on the nominal model.

use crate::error::{Error, Result};
use crate::model::StateSpaceModel;
use crate::numerics::{eig, ensure_shape, solve_care, Matrix};

/// LQ weights for the controller (`Qc`, `Rc`) and the observer (`Qo`, `Ro`).
#[derive(Clone, Debug, PartialEq)]
pub struct DesignWeights {
    pub qc: Matrix,
    pub rc: Matrix,
    pub qo: Matrix,
    pub ro: Matrix,
}

impl DesignWeights {
    pub fn identity(n: usize, n_u: usize, n_y: usize) -> Self {
        Self {
            qc: Matrix::identity(n, n),
            rc: Matrix::identity(n_u, n_u),
            qo: Matrix::identity(n, n),
            ro: Matrix::identity(n_y, n_y),
        }
    }

    pub fn identity_for(model: &StateSpaceModel) -> Self {
        Self::identity(model.n(), model.n_u(), model.n_y())
    }
}

/// Gains and closed-loop matrices; `a_h` equals `a_c_hat` (system-matched hold).
#[derive(Clone, Debug, PartialEq)]
pub struct ControlDesign {
    pub k_hat: Matrix,
    pub l_hat: Matrix,
    pub a_c_hat: Matrix,
    pub a_o_hat: Matrix,
    pub a_h: Matrix,
}

pub fn design_controller(nominal: &StateSpaceModel, weights: &DesignWeights) -> Result<ControlDesign> {
    let (n, n_u, n_y) = (nominal.n(), nominal.n_u(), nominal.n_y());
    ensure_shape(&weights.qc, n, n, "Qc")?;
    ensure_shape(&weights.rc, n_u, n_u, "Rc")?;
    ensure_shape(&weights.qo, n, n, "Qo")?;
    ensure_shape(&weights.ro, n_y, n_y, "Ro")?;
    let (a, b, c) = (nominal.a(), nominal.b(), nominal.c());

    let pc = solve_care(a, b, &weights.qc, &weights.rc)?;
    let k_hat = weights
        .rc
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Design("Rc is not positive definite".into()))?
        .solve(&(b.transpose() * &pc));

    let po = solve_care(&a.transpose(), &c.transpose(), &weights.qo, &weights.ro)?;
    let l_hat = weights
        .ro
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Design("Ro is not positive definite".into()))?
        .solve(&(c * &po))
        .transpose();

    let a_c_hat = a - b * &k_hat;
    let a_o_hat = a - &l_hat * c;
    for (m, name) in [(&a_c_hat, "controller"), (&a_o_hat, "observer")] {
        if eig(m)?.values.iter().any(|l| l.re >= 0.0) {
            return Err(Error::Design(format!("{name} closed loop is not stable")));
        }
    }
    Ok(ControlDesign { k_hat, l_hat, a_h: a_c_hat.clone(), a_c_hat, a_o_hat })
}

/// `k = k̂·T̂`.
pub fn effective_gain(design: &ControlDesign, state_map: &Matrix) -> Result<Matrix> {
    if design.k_hat.ncols() != state_map.nrows() {
        return Err(Error::Dimension(format!(
            "k_hat has {} columns but the state map has {} rows",
            design.k_hat.ncols(),
            state_map.nrows()
        )));
    }
    Ok(&design.k_hat * state_map)
}

/// Continuous observer-based closed loop on the nominal model, state `(x, x_o)`.
pub fn nominal_closed_loop(nominal: &StateSpaceModel, design: &ControlDesign) -> Matrix {
    let n = nominal.n();
    let bk = nominal.b() * &design.k_hat;
    let lc = &design.l_hat * nominal.c();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(nominal.a());
    m.view_mut((0, n), (n, n)).copy_from(&(-&bk));
    m.view_mut((n, 0), (n, n)).copy_from(&lc);
    m.view_mut((n, n), (n, n)).copy_from(&(nominal.a() - &bk - &lc));
    m
}
