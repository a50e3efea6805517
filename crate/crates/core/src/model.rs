//! Plant models, the ρ-parameterized deviation family and the example systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    ensure_finite, ensure_shape, is_symmetric, matrix_from_rows, matrix_to_rows, min_symmetric_eigenvalue, rank,
    to_complex, CMatrix, Matrix, C64,
};

/// Relative singular-value tolerance for controllability and observability.
pub const RANK_TOL: f64 = 1e-8;

const THREE_LINK_JSON: &str = include_str!("../data/three_link.json");

/// Linear time-invariant model `ẋ = Ax + Bu`, `y = Cx`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceModel {
    a: Matrix,
    b: Matrix,
    c: Matrix,
}

impl StateSpaceModel {
    /// Validates dimensions, finiteness, controllability and observability.
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        let model = Self::unchecked(a, b, c)?;
        if !model.is_controllable() {
            return Err(Error::Domain("(A, B) is not controllable".into()));
        }
        if !model.is_observable() {
            return Err(Error::Domain("(A, C) is not observable".into()));
        }
        Ok(model)
    }

    fn unchecked(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        let n = a.nrows();
        ensure_shape(&a, n, n, "A")?;
        if n == 0 || b.ncols() == 0 || c.nrows() == 0 {
            return Err(Error::Dimension("model matrices must be non-empty".into()));
        }
        ensure_shape(&b, n, b.ncols(), "B")?;
        ensure_shape(&c, c.nrows(), n, "C")?;
        for (m, name) in [(&a, "A"), (&b, "B"), (&c, "C")] {
            ensure_finite(m, name)?;
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn c(&self) -> &Matrix {
        &self.c
    }
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    pub fn n_u(&self) -> usize {
        self.b.ncols()
    }
    pub fn n_y(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_controllable(&self) -> bool {
        rank(&controllability_matrix(&self.a, &self.b), RANK_TOL) == self.n()
    }

    pub fn is_observable(&self) -> bool {
        rank(&controllability_matrix(&self.a.transpose(), &self.c.transpose()), RANK_TOL) == self.n()
    }

    /// `C (sI − A)⁻¹ B`.
    pub fn transfer_function(&self, s: C64) -> Result<CMatrix> {
        let n = self.n();
        let resolvent = CMatrix::identity(n, n) * s - to_complex(&self.a);
        let x = resolvent
            .lu()
            .solve(&to_complex(&self.b))
            .ok_or_else(|| Error::Domain(format!("s = {s} is a pole of the model")))?;
        Ok(to_complex(&self.c) * x)
    }
}

/// `[B, AB, …, Aⁿ⁻¹B]`.
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.nrows();
    let m = b.ncols();
    let mut out = Matrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        out.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = a * block;
    }
    out
}

/// Deviation matrices `(Ã₁, B̃₁, C̃₁)` in actual-state coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationTriple {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

impl DeviationTriple {
    pub fn zeros(n: usize, n_u: usize, n_y: usize) -> Self {
        Self { a: Matrix::zeros(n, n), b: Matrix::zeros(n, n_u), c: Matrix::zeros(n_y, n) }
    }

    /// Input-gain deviation `B̃₁ = (1 − b)·B̂`, so that ρ = 1 gives `B = b·B̂`.
    pub fn gain(nominal: &StateSpaceModel, b: f64) -> Self {
        Self {
            a: Matrix::zeros(nominal.n(), nominal.n()),
            b: nominal.b() * (1.0 - b),
            c: Matrix::zeros(nominal.n_y(), nominal.n()),
        }
    }

    pub fn scaled(&self, rho: f64) -> Self {
        Self { a: &self.a * rho, b: &self.b * rho, c: &self.c * rho }
    }
}

/// Nominal model, deviation family, ρ and state map, with the actual model
/// `A = T̂ᵀÂT̂ − ρÃ₁`, `B = T̂ᵀB̂ − ρB̃₁`, `C = ĈT̂ − ρC̃₁`.
#[derive(Clone, Debug)]
pub struct PlantScenario {
    nominal: StateSpaceModel,
    deviation: DeviationTriple,
    rho: f64,
    state_map: Matrix,
    actual: StateSpaceModel,
}

impl PlantScenario {
    pub fn nominal(&self) -> &StateSpaceModel {
        &self.nominal
    }
    pub fn deviation(&self) -> &DeviationTriple {
        &self.deviation
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn state_map(&self) -> &Matrix {
        &self.state_map
    }
    pub fn actual(&self) -> &StateSpaceModel {
        &self.actual
    }

    /// `(Ã, B̃, C̃) = ρ·(Ã₁, B̃₁, C̃₁)`.
    pub fn applied_deviation(&self) -> DeviationTriple {
        self.deviation.scaled(self.rho)
    }

    /// The same nominal model and deviation family at a different ρ.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        make_scenario(self.nominal.clone(), self.deviation.clone(), rho, self.state_map.clone())
    }
}

/// Nominal matrices lifted to actual-state coordinates through `T̂`.
pub fn embed_nominal(nominal: &StateSpaceModel, state_map: &Matrix) -> (Matrix, Matrix, Matrix) {
    let tt = state_map.transpose();
    (&tt * nominal.a() * state_map, &tt * nominal.b(), nominal.c() * state_map)
}

pub fn make_scenario(
    nominal: StateSpaceModel,
    deviation: DeviationTriple,
    rho: f64,
    state_map: Matrix,
) -> Result<PlantScenario> {
    if !rho.is_finite() {
        return Err(Error::Domain("rho must be finite".into()));
    }
    let nh = nominal.n();
    let n = deviation.a.nrows();
    ensure_shape(&state_map, nh, n, "state map")?;
    ensure_finite(&state_map, "state map")?;
    ensure_shape(&deviation.a, n, n, "deviation A")?;
    ensure_shape(&deviation.b, n, nominal.n_u(), "deviation B")?;
    ensure_shape(&deviation.c, nominal.n_y(), n, "deviation C")?;
    if rank(&state_map, RANK_TOL) != nh {
        return Err(Error::Domain("state map must have full row rank".into()));
    }
    let (ae, be, ce) = embed_nominal(&nominal, &state_map);
    let actual = StateSpaceModel::new(ae - &deviation.a * rho, be - &deviation.b * rho, ce - &deviation.c * rho)
        .map_err(|e| Error::Domain(format!("actual model: {e}")))?;
    Ok(PlantScenario { nominal, deviation, rho, state_map, actual })
}

/// Nominal model with an input-gain deviation so that ρ = 1 scales `B̂` by `b`.
pub fn gain_scenario(nominal: StateSpaceModel, b: f64, rho: f64) -> Result<PlantScenario> {
    let n = nominal.n();
    let deviation = DeviationTriple::gain(&nominal, b);
    make_scenario(nominal, deviation, rho, Matrix::identity(n, n))
}

/// `b/(s² − 1)` with states (velocity, position).
pub fn simple_system(b: f64) -> Result<StateSpaceModel> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Domain("simple system gain must be finite and nonzero".into()));
    }
    StateSpaceModel::new(
        Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        Matrix::from_row_slice(2, 1, &[b, 0.0]),
        Matrix::from_row_slice(1, 2, &[0.0, 1.0]),
    )
}

/// Simple system designed for unit gain, with actual gain `b` at ρ = 1.
pub fn simple_scenario(b: f64, rho: f64) -> Result<PlantScenario> {
    gain_scenario(simple_system(1.0)?, b, rho)
}

/// Simple system `b/(s² − 1)` driven through the unmodelled actuator
/// `ω²/(s² + 2ζωs + ω²)`. Actual states are (velocity, position, w, ẇ).
pub fn neglected_dynamics_scenario(omega_n: f64, zeta: f64, b: f64) -> Result<PlantScenario> {
    if !(omega_n > 0.0 && omega_n.is_finite()) {
        return Err(Error::Domain("omega_n must be positive".into()));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::Domain("zeta must lie in (0, 1)".into()));
    }
    let nominal = simple_system(b)?;
    let w2 = omega_n * omega_n;
    #[rustfmt::skip]
    let a = Matrix::from_row_slice(4, 4, &[
        0.0, 1.0, b,   0.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -w2, -2.0 * zeta * omega_n,
    ]);
    let bm = Matrix::from_row_slice(4, 1, &[0.0, 0.0, 0.0, w2]);
    let c = Matrix::from_row_slice(1, 4, &[0.0, 1.0, 0.0, 0.0]);
    let mut state_map = Matrix::zeros(2, 4);
    state_map[(0, 0)] = 1.0;
    state_map[(1, 1)] = 1.0;
    let (ae, be, ce) = embed_nominal(&nominal, &state_map);
    let deviation = DeviationTriple { a: ae - a, b: be - bm, c: ce - c };
    make_scenario(nominal, deviation, 1.0, state_map)
}

/// Bundled linearized triple inverted pendulum (6 states, 3 torques, 3 angles).
pub fn three_link_model() -> Result<StateSpaceModel> {
    let file: ModelFile = serde_json::from_str(THREE_LINK_JSON)
        .map_err(|e| Error::Config(format!("bundled three-link model: {e}")))?;
    file.to_model()
}

/// Three-link model designed with its nominal gains, actual torque gain `b`.
pub fn three_link_scenario(b: f64) -> Result<PlantScenario> {
    if !(b > 0.0) {
        return Err(Error::Domain("three-link gain must be positive".into()));
    }
    gain_scenario(three_link_model()?, b, 1.0)
}

/// On-disk model: `{name, A, B, C}` with row-major nested arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

impl ModelFile {
    pub fn to_model(&self) -> Result<StateSpaceModel> {
        let err = |what: &str, e: Error| Error::Config(format!("model '{}' {what}: {e}", self.name));
        let a = matrix_from_rows(&self.a).map_err(|e| err("A", e))?;
        let b = matrix_from_rows(&self.b).map_err(|e| err("B", e))?;
        let c = matrix_from_rows(&self.c).map_err(|e| err("C", e))?;
        StateSpaceModel::new(a, b, c).map_err(|e| err("", e))
    }

    pub fn from_model(name: &str, model: &StateSpaceModel) -> Self {
        Self {
            name: name.to_string(),
            a: matrix_to_rows(model.a()),
            b: matrix_to_rows(model.b()),
            c: matrix_to_rows(model.c()),
        }
    }
}

/// Event detector: fire when `e_hpᵀ Q_t e_hp ≥ q_t²` once `τ` has passed `delta_min`.
#[derive(Clone, Debug, PartialEq)]
pub struct EventConfig {
    qt_matrix: Matrix,
    q_t: f64,
    delta_min: f64,
}

impl EventConfig {
    pub fn new(qt_matrix: Matrix, q_t: f64, delta_min: f64) -> Result<Self> {
        if qt_matrix.nrows() != qt_matrix.ncols() {
            return Err(Error::Dimension("Q_t must be square".into()));
        }
        ensure_finite(&qt_matrix, "Q_t")?;
        let scale = qt_matrix.amax().max(1.0);
        if !is_symmetric(&qt_matrix, 1e-12) || min_symmetric_eigenvalue(&qt_matrix) < -1e-12 * scale {
            return Err(Error::Domain("Q_t must be symmetric positive semi-definite".into()));
        }
        if !(q_t > 0.0 && q_t.is_finite()) {
            return Err(Error::Domain("q_t must be positive".into()));
        }
        if !(delta_min > 0.0 && delta_min.is_finite()) {
            return Err(Error::Domain("delta_min must be positive".into()));
        }
        Ok(Self { qt_matrix, q_t, delta_min })
    }

    /// `Q_t = I`, `q_t = 0.1`, `Δ_min = 0.1 s`.
    pub fn default_for(n_hat: usize) -> Self {
        Self { qt_matrix: Matrix::identity(n_hat, n_hat), q_t: 0.1, delta_min: 0.1 }
    }

    pub fn qt_matrix(&self) -> &Matrix {
        &self.qt_matrix
    }
    pub fn q_t(&self) -> f64 {
        self.q_t
    }
    pub fn delta_min(&self) -> f64 {
        self.delta_min
    }

    pub fn with_threshold(&self, q_t: f64) -> Result<Self> {
        Self::new(self.qt_matrix.clone(), q_t, self.delta_min)
    }
}
