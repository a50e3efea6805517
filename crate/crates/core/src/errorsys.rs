//! Augmented error system with state `X̄ = (x, x̃_o, x̃_h)`, where
//! `x̃_o = x_o − T̂x` and `x̃_h = x_h − T̂x`.

use crate::design::ControlDesign;
use crate::error::{Error, Result};
use crate::model::{PlantScenario, StateSpaceModel};
use crate::numerics::{ensure_shape, expm, Matrix};

#[derive(Clone, Debug)]
pub struct ErrorSystem {
    /// Intersample dynamics.
    pub a_bar_c: Matrix,
    /// Event jump: copies `x̃_o` into `x̃_h`.
    pub a_bar_d: Matrix,
    /// Output map `[C, 0, 0]`.
    pub c_bar_c: Matrix,
    /// Drops the hold block.
    pub t_reduce: Matrix,
    /// Duplicates the observer block into the hold block.
    pub t_expand: Matrix,
    /// `e_hp = x_h − x_o = [0, −I, I]·X̄`.
    pub t_event: Matrix,
    /// `(n, n̂, n̂)`.
    pub block_dims: (usize, usize, usize),
    pub state_map: Matrix,
}

impl ErrorSystem {
    fn from_parts(a_bar_c: Matrix, c: &Matrix, state_map: Matrix) -> Self {
        let (nh, n) = state_map.shape();
        let big = n + 2 * nh;
        let red = n + nh;
        let mut a_bar_d = Matrix::identity(big, big);
        a_bar_d.view_mut((red, 0), (nh, big)).fill(0.0);
        a_bar_d.view_mut((red, n), (nh, nh)).fill_with_identity();
        let mut c_bar_c = Matrix::zeros(c.nrows(), big);
        c_bar_c.view_mut((0, 0), (c.nrows(), n)).copy_from(c);
        let t_reduce = Matrix::identity(red, big);
        let mut t_expand = Matrix::zeros(big, red);
        t_expand.view_mut((0, 0), (red, red)).fill_with_identity();
        t_expand.view_mut((red, n), (nh, nh)).fill_with_identity();
        let mut t_event = Matrix::zeros(nh, big);
        t_event.view_mut((0, n), (nh, nh)).fill_with_identity();
        t_event.view_mut((0, red), (nh, nh)).fill_with_identity();
        t_event.view_mut((0, n), (nh, nh)).scale_mut(-1.0);
        Self { a_bar_c, a_bar_d, c_bar_c, t_reduce, t_expand, t_event, block_dims: (n, nh, nh), state_map }
    }

    /// Size of `X̄`.
    pub fn dim(&self) -> usize {
        self.a_bar_c.nrows()
    }

    /// Size of the reduced state `x̄ = (x, x̃_o)`.
    pub fn reduced_dim(&self) -> usize {
        self.block_dims.0 + self.block_dims.1
    }

    /// `expm(ĀC·τ)`.
    pub fn transition(&self, tau: f64) -> Result<Matrix> {
        expm(&(&self.a_bar_c * tau))
    }

    /// `φ̄(Δ) = 𝔗·ĀD·expm(ĀC·Δ)·𝔗̄`.
    pub fn phi_bar(&self, delta: f64) -> Result<Matrix> {
        phi_bar(self, delta)
    }
}

pub fn phi_bar(es: &ErrorSystem, delta: f64) -> Result<Matrix> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("intermittent interval must be nonnegative, got {delta}")));
    }
    Ok(&es.t_reduce * &es.a_bar_d * es.transition(delta)? * &es.t_expand)
}

/// Error system for the mismatched plant of `scenario` under `design`.
pub fn assemble(scenario: &PlantScenario, design: &ControlDesign) -> Result<ErrorSystem> {
    let nominal = scenario.nominal();
    let actual = scenario.actual();
    let t = scenario.state_map();
    let (nh, n) = t.shape();
    ensure_shape(&design.k_hat, nominal.n_u(), nh, "k_hat")?;
    ensure_shape(&design.l_hat, nh, nominal.n_y(), "L_hat")?;
    let (a, b, c) = (actual.a(), actual.b(), actual.c());
    let (ah, bh, ch) = (nominal.a(), nominal.b(), nominal.c());
    let k = &design.k_hat;
    let l = &design.l_hat;
    let kt = k * t;
    let bk = b * k;
    let b_err = bh - t * b;

    let mut m = Matrix::zeros(n + 2 * nh, n + 2 * nh);
    let (r0, r1, r2) = (0, n, n + nh);
    m.view_mut((r0, 0), (n, n)).copy_from(&(a - b * &kt));
    m.view_mut((r0, r2), (n, nh)).copy_from(&(-&bk));

    let xo_x = ah * t - l * (ch * t - c) - t * a - &b_err * &kt;
    m.view_mut((r1, 0), (nh, n)).copy_from(&xo_x);
    m.view_mut((r1, r1), (nh, nh)).copy_from(&design.a_o_hat);
    m.view_mut((r1, r2), (nh, nh)).copy_from(&(-&b_err * k));

    // Â_c T̂ − T̂(A − Bk̂T̂) and Â_c + T̂Bk̂, expanded so that matched models
    // cancel exactly.
    m.view_mut((r2, 0), (nh, n)).copy_from(&(ah * t - t * a - &b_err * &kt));
    m.view_mut((r2, r2), (nh, nh)).copy_from(&(ah - &b_err * k));

    Ok(ErrorSystem::from_parts(m, c, t.clone()))
}

/// Error system for a perfectly known plant:
/// `[[A_c, 0, −Bk], [0, A_o, 0], [0, 0, A]]`.
pub fn assemble_nominal(model: &StateSpaceModel, design: &ControlDesign) -> Result<ErrorSystem> {
    let n = model.n();
    ensure_shape(&design.k_hat, model.n_u(), n, "k_hat")?;
    let mut m = Matrix::zeros(3 * n, 3 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&design.a_c_hat);
    m.view_mut((0, 2 * n), (n, n)).copy_from(&(-(model.b() * &design.k_hat)));
    m.view_mut((n, n), (n, n)).copy_from(&design.a_o_hat);
    m.view_mut((2 * n, 2 * n), (n, n)).copy_from(model.a());
    Ok(ErrorSystem::from_parts(m, model.c(), Matrix::identity(n, n)))
}
