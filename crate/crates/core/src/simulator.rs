//! Event-driven hybrid simulation of intermittent control and of the
//! equivalent continuous controller.

use crate::analysis::coordinates;
use crate::design::ControlDesign;
use crate::error::{Error, Result};
use crate::model::{EventConfig, PlantScenario};
use crate::numerics::{expm, CVector, EigenDecomposition, Matrix, Vector};

/// Runs stop once `‖x‖∞` exceeds this.
pub const DIVERGENCE_LIMIT: f64 = 1e9;
/// Tail intervals whose relative spread exceeds this count as not converged.
pub const CONVERGENCE_SPREAD: f64 = 0.10;
/// Consecutive event states at or below this cosine similarity alternate sign.
pub const ALTERNATION_COSINE: f64 = -0.9;
pub const MIN_TAIL_EVENTS: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub x0: Vector,
    /// Observer initial state; zero when absent.
    pub xo0: Option<Vector>,
    pub duration: f64,
    pub dt: f64,
}

impl SimulationConfig {
    /// `dt = 1e-3 s` and a zero observer state.
    pub fn new(x0: Vector, duration: f64) -> Self {
        Self { x0, xo0: None, duration, dt: 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SimulationStatus {
    Completed,
    /// `‖x‖∞` exceeded [`DIVERGENCE_LIMIT`] at this time; the trace stops there.
    Diverged { time: f64 },
}

#[derive(Clone, Debug)]
pub struct SimulationTrace {
    pub dt: f64,
    pub times: Vec<f64>,
    pub x: Vec<Vector>,
    pub x_o: Vec<Vector>,
    /// Empty for continuous runs.
    pub x_h: Vec<Vector>,
    pub u: Vec<Vector>,
    pub y: Vec<Vector>,
    /// Event times, starting with the implicit event at `t = 0`.
    pub events: Vec<f64>,
    /// Sample index of each event.
    pub event_steps: Vec<usize>,
    /// `x̄ = (x, x_o − T̂x)` at each event.
    pub event_states: Vec<Vector>,
    /// `e_hpᵀQ_t e_hp` just before each triggered reset (one fewer than `events`).
    pub trigger_values: Vec<f64>,
    /// `Δ_i = t_{i+1} − t_i`.
    pub intervals: Vec<f64>,
    pub chi: Option<Vec<CVector>>,
    pub state_map: Matrix,
    pub status: SimulationStatus,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn diverged(&self) -> bool {
        matches!(self.status, SimulationStatus::Diverged { .. })
    }

    /// `x̄ = (x, x_o − T̂x)` at sample `i`.
    pub fn xbar(&self, i: usize) -> Vector {
        xbar(&self.x[i], &self.x_o[i], &self.state_map)
    }
}

fn xbar(x: &Vector, x_o: &Vector, state_map: &Matrix) -> Vector {
    let n = x.len();
    let nh = x_o.len();
    let mut v = Vector::zeros(n + nh);
    v.rows_mut(0, n).copy_from(x);
    v.rows_mut(n, nh).copy_from(&(x_o - state_map * x));
    v
}

/// Joint dynamics of `(x, x_o, x_h)` between events.
pub fn intermittent_matrix(scenario: &PlantScenario, design: &ControlDesign) -> Matrix {
    let (actual, nominal) = (scenario.actual(), scenario.nominal());
    let n = actual.n();
    let nh = nominal.n();
    let lc = &design.l_hat * actual.c();
    let mut m = Matrix::zeros(n + 2 * nh, n + 2 * nh);
    m.view_mut((0, 0), (n, n)).copy_from(actual.a());
    m.view_mut((0, n + nh), (n, nh)).copy_from(&(-(actual.b() * &design.k_hat)));
    m.view_mut((n, 0), (nh, n)).copy_from(&lc);
    m.view_mut((n, n), (nh, nh)).copy_from(&design.a_o_hat);
    m.view_mut((n, n + nh), (nh, nh)).copy_from(&(-(nominal.b() * &design.k_hat)));
    m.view_mut((n + nh, n + nh), (nh, nh)).copy_from(&design.a_h);
    m
}

/// Continuous observer-based loop `u = −k̂x_o` on the actual plant, state `(x, x_o)`.
pub fn continuous_closed_loop(scenario: &PlantScenario, design: &ControlDesign) -> Matrix {
    let (actual, nominal) = (scenario.actual(), scenario.nominal());
    let n = actual.n();
    let nh = nominal.n();
    let mut m = Matrix::zeros(n + nh, n + nh);
    m.view_mut((0, 0), (n, n)).copy_from(actual.a());
    m.view_mut((0, n), (n, nh)).copy_from(&(-(actual.b() * &design.k_hat)));
    m.view_mut((n, 0), (nh, n)).copy_from(&(&design.l_hat * actual.c()));
    m.view_mut((n, n), (nh, nh)).copy_from(&(&design.a_o_hat - nominal.b() * &design.k_hat));
    m
}

fn check_config(scenario: &PlantScenario, cfg: &SimulationConfig) -> Result<(usize, Vector)> {
    let n = scenario.actual().n();
    let nh = scenario.nominal().n();
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(Error::Domain("dt must be positive".into()));
    }
    if !(cfg.duration >= 10.0 * cfg.dt && cfg.duration.is_finite()) {
        return Err(Error::Domain("duration must be at least 10 steps".into()));
    }
    if cfg.x0.len() != n {
        return Err(Error::Dimension(format!("x0 has {} entries, expected {n}", cfg.x0.len())));
    }
    let xo0 = cfg.xo0.clone().unwrap_or_else(|| Vector::zeros(nh));
    if xo0.len() != nh {
        return Err(Error::Dimension(format!("xo0 has {} entries, expected {nh}", xo0.len())));
    }
    if cfg.x0.iter().chain(xo0.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("initial state must be finite".into()));
    }
    Ok(((cfg.duration / cfg.dt).round() as usize, xo0))
}

fn empty_trace(scenario: &PlantScenario, dt: f64, capacity: usize) -> SimulationTrace {
    SimulationTrace {
        dt,
        times: Vec::with_capacity(capacity),
        x: Vec::with_capacity(capacity),
        x_o: Vec::with_capacity(capacity),
        x_h: Vec::new(),
        u: Vec::with_capacity(capacity),
        y: Vec::with_capacity(capacity),
        events: Vec::new(),
        event_steps: Vec::new(),
        event_states: Vec::new(),
        trigger_values: Vec::new(),
        intervals: Vec::new(),
        chi: None,
        state_map: scenario.state_map().clone(),
        status: SimulationStatus::Completed,
    }
}

pub fn simulate_intermittent(
    scenario: &PlantScenario,
    design: &ControlDesign,
    event: &EventConfig,
    cfg: &SimulationConfig,
) -> Result<SimulationTrace> {
    let (steps, xo0) = check_config(scenario, cfg)?;
    let n = scenario.actual().n();
    let nh = scenario.nominal().n();
    if event.qt_matrix().nrows() != nh {
        return Err(Error::Dimension("Q_t does not match the observer dimension".into()));
    }
    if event.delta_min() < cfg.dt {
        return Err(Error::Domain("delta_min must be at least dt".into()));
    }
    let step = expm(&(intermittent_matrix(scenario, design) * cfg.dt))?;
    // Smallest step count whose elapsed time strictly exceeds delta_min.
    let lockout = (event.delta_min() / cfg.dt + 1e-9).floor() as usize + 1;
    let threshold = event.q_t() * event.q_t();
    let c = scenario.actual().c();

    let mut z = Vector::zeros(n + 2 * nh);
    z.rows_mut(0, n).copy_from(&cfg.x0);
    z.rows_mut(n, nh).copy_from(&xo0);
    z.rows_mut(n + nh, nh).copy_from(&xo0);

    let mut trace = empty_trace(scenario, cfg.dt, steps + 1);
    trace.x_h.reserve(steps + 1);
    let record = |trace: &mut SimulationTrace, t: f64, z: &Vector| {
        let x = z.rows(0, n).into_owned();
        let x_h = z.rows(n + nh, nh).into_owned();
        trace.times.push(t);
        trace.y.push(c * &x);
        trace.u.push(-(&design.k_hat * &x_h));
        trace.x.push(x);
        trace.x_o.push(z.rows(n, nh).into_owned());
        trace.x_h.push(x_h);
    };
    record(&mut trace, 0.0, &z);
    trace.events.push(0.0);
    trace.event_steps.push(0);
    trace.event_states.push(trace.xbar(0));

    let mut tau = 0usize;
    for s in 1..=steps {
        let t = s as f64 * cfg.dt;
        z = &step * &z;
        tau += 1;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Simulation { time: t, message: "state became non-finite".into() });
        }
        if tau >= lockout {
            let e = z.rows(n + nh, nh) - z.rows(n, nh);
            let value = (e.transpose() * event.qt_matrix() * &e)[(0, 0)];
            if value >= threshold {
                let xo = z.rows(n, nh).into_owned();
                z.rows_mut(n + nh, nh).copy_from(&xo);
                tau = 0;
                let last = *trace.events.last().unwrap_or(&0.0);
                trace.intervals.push(t - last);
                trace.events.push(t);
                trace.event_steps.push(s);
                trace.trigger_values.push(value);
            }
        }
        record(&mut trace, t, &z);
        if tau == 0 {
            let i = trace.len() - 1;
            trace.event_states.push(trace.xbar(i));
        }
        if z.rows(0, n).amax() > DIVERGENCE_LIMIT {
            trace.status = SimulationStatus::Diverged { time: t };
            break;
        }
    }
    Ok(trace)
}

pub fn simulate_continuous(
    scenario: &PlantScenario,
    design: &ControlDesign,
    cfg: &SimulationConfig,
) -> Result<SimulationTrace> {
    let (steps, xo0) = check_config(scenario, cfg)?;
    let n = scenario.actual().n();
    let nh = scenario.nominal().n();
    let step = expm(&(continuous_closed_loop(scenario, design) * cfg.dt))?;
    let c = scenario.actual().c();
    let mut z = Vector::zeros(n + nh);
    z.rows_mut(0, n).copy_from(&cfg.x0);
    z.rows_mut(n, nh).copy_from(&xo0);
    let mut trace = empty_trace(scenario, cfg.dt, steps + 1);
    for s in 0..=steps {
        if s > 0 {
            z = &step * &z;
        }
        let t = s as f64 * cfg.dt;
        let x = z.rows(0, n).into_owned();
        let x_o = z.rows(n, nh).into_owned();
        trace.times.push(t);
        trace.y.push(c * &x);
        trace.u.push(-(&design.k_hat * &x_o));
        trace.x.push(x);
        trace.x_o.push(x_o);
        if !(z.rows(0, n).amax() <= DIVERGENCE_LIMIT) {
            trace.status = SimulationStatus::Diverged { time: t };
            break;
        }
    }
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleMeasurement {
    pub period: f64,
    pub amplitude: f64,
    /// Every inter-event interval of the run.
    pub intervals: Vec<f64>,
    pub tail_intervals: Vec<f64>,
    pub mean_interval: f64,
    /// `(max − min)/mean` over the tail intervals.
    pub relative_spread: f64,
    /// Consecutive tail event states all anti-aligned.
    pub alternating: bool,
    pub mean_cosine: f64,
}

impl CycleMeasurement {
    pub fn converged(&self) -> bool {
        self.relative_spread <= CONVERGENCE_SPREAD
    }
}

fn cosine(a: &Vector, b: &Vector) -> f64 {
    let d = a.norm() * b.norm();
    if d == 0.0 {
        0.0
    } else {
        a.dot(b) / d
    }
}

/// Period and amplitude over the last `tail_fraction` of the run.
pub fn measure_cycle(trace: &SimulationTrace, tail_fraction: f64) -> Result<CycleMeasurement> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Domain("tail fraction must lie in (0, 1]".into()));
    }
    let t_end = *trace.times.last().ok_or_else(|| Error::Measurement("empty trace".into()))?;
    let start = t_end * (1.0 - tail_fraction);
    let first = trace.events.iter().position(|&t| t >= start).unwrap_or(trace.events.len());
    let tail_events = &trace.events[first..];
    if tail_events.len() < MIN_TAIL_EVENTS {
        return Err(Error::Measurement(format!(
            "{} events in the tail window, need at least {MIN_TAIL_EVENTS}",
            tail_events.len()
        )));
    }
    let tail_intervals: Vec<f64> = tail_events.windows(2).map(|w| w[1] - w[0]).collect();
    let mean_interval = tail_intervals.iter().sum::<f64>() / tail_intervals.len() as f64;
    let lo = tail_intervals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail_intervals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cosines: Vec<f64> = trace.event_states[first..].windows(2).map(|w| cosine(&w[0], &w[1])).collect();
    let alternating = cosines.iter().all(|&c| c <= ALTERNATION_COSINE);
    let mean_cosine = cosines.iter().sum::<f64>() / cosines.len() as f64;
    let amplitude = trace
        .times
        .iter()
        .zip(&trace.x)
        .filter(|(t, _)| **t >= start)
        .map(|(_, x)| x.amax())
        .fold(0.0, f64::max);
    Ok(CycleMeasurement {
        period: if alternating { 2.0 * mean_interval } else { mean_interval },
        amplitude,
        intervals: trace.intervals.clone(),
        tail_intervals,
        mean_interval,
        relative_spread: (hi - lo) / mean_interval,
        alternating,
        mean_cosine,
    })
}

/// Fills `chi` with `V⁻¹·x̄` at every sample.
pub fn attach_eigen_coordinates(trace: &SimulationTrace, basis: &EigenDecomposition) -> Result<SimulationTrace> {
    let dim = trace.state_map.ncols() + trace.state_map.nrows();
    if basis.dim() != dim {
        return Err(Error::Dimension(format!("basis has size {}, trace state has {dim}", basis.dim())));
    }
    let chi = (0..trace.len()).map(|i| coordinates(basis, &trace.xbar(i))).collect::<Result<Vec<_>>>()?;
    let mut out = trace.clone();
    out.chi = Some(chi);
    Ok(out)
}
