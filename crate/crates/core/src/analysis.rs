//! Spectral analysis of the sampled map `φ̄(Δ)`: sweeps, the critical
//! interval, cycle classification and amplitude prediction.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::errorsys::ErrorSystem;
use crate::model::EventConfig;
use crate::numerics::{eig, CVector, EigenDecomposition, Vector, C64};

pub const DEFAULT_TOL_REAL: f64 = 1e-6;
pub const DEFAULT_TOL_MARGIN: f64 = 1e-3;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-10;
/// Largest `|ρ(φ̄(Δ)) − 1|` accepted as "on the unit circle".
pub const UNIT_CIRCLE_TOL: f64 = 1e-6;
/// Eigenvector bases worse than this are rejected for coordinate changes.
pub const CONDITIONING_LIMIT: f64 = 1e10;
pub const TRAJECTORY_SAMPLES: usize = 201;

/// Spectra of `φ̄(Δ)` on a uniform grid.
#[derive(Clone, Debug)]
pub struct SpectralSweep {
    pub deltas: Vec<f64>,
    pub max_magnitudes: Vec<f64>,
    pub spectra: Vec<Vec<C64>>,
}

impl SpectralSweep {
    /// Grid cell where the spectral radius first rises from below 1 to at least 1.
    pub fn first_crossing(&self) -> Option<(f64, f64)> {
        (1..self.deltas.len())
            .find(|&i| self.max_magnitudes[i - 1] < 1.0 && self.max_magnitudes[i] >= 1.0)
            .map(|i| (self.deltas[i - 1], self.deltas[i]))
    }

    /// Number of grid cells where the spectral radius crosses 1 in either direction.
    pub fn crossing_count(&self) -> usize {
        self.max_magnitudes.windows(2).filter(|w| (w[0] < 1.0) != (w[1] < 1.0)).count()
    }
}

pub fn sweep(es: &ErrorSystem, delta_min: f64, delta_max: f64, steps: usize) -> Result<SpectralSweep> {
    if !(delta_min > 0.0 && delta_min < delta_max && delta_max.is_finite()) {
        return Err(Error::Domain(format!("invalid sweep range [{delta_min}, {delta_max}]")));
    }
    if steps < 2 {
        return Err(Error::Domain("a sweep needs at least two steps".into()));
    }
    let deltas: Vec<f64> = (0..steps)
        .map(|i| {
            if i + 1 == steps {
                delta_max
            } else {
                delta_min + (delta_max - delta_min) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    let spectra = deltas
        .par_iter()
        .map(|&d| Ok(eig(&es.phi_bar(d)?)?.values))
        .collect::<Result<Vec<_>>>()?;
    let max_magnitudes = spectra.iter().map(|s| s.iter().map(|v| v.norm()).fold(0.0, f64::max)).collect();
    Ok(SpectralSweep { deltas, max_magnitudes, spectra })
}

/// `ρ(φ̄(Δ))`.
pub fn spectral_radius_at(es: &ErrorSystem, delta: f64) -> Result<f64> {
    Ok(eig(&es.phi_bar(delta)?)?.spectral_radius())
}

#[derive(Clone, Debug)]
pub struct CriticalInterval {
    pub delta: f64,
    pub spectrum: EigenDecomposition,
}

/// Bisection on `ρ(φ̄(Δ)) − 1` inside a bracket where it changes sign.
pub fn find_delta_crit(es: &ErrorSystem, bracket: (f64, f64), tol: f64) -> Result<CriticalInterval> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && lo < hi && tol > 0.0) {
        return Err(Error::Domain(format!("invalid bracket ({lo}, {hi}) or tolerance {tol}")));
    }
    let g = |d: f64| spectral_radius_at(es, d).map(|r| r - 1.0);
    let g_lo = g(lo)?;
    let g_hi = g(hi)?;
    if g_lo == 0.0 {
        return Ok(CriticalInterval { delta: lo, spectrum: eig(&es.phi_bar(lo)?)? });
    }
    if g_hi == 0.0 {
        return Ok(CriticalInterval { delta: hi, spectrum: eig(&es.phi_bar(hi)?)? });
    }
    if (g_lo < 0.0) == (g_hi < 0.0) {
        return Err(Error::Search(format!(
            "spectral radius does not cross 1 on [{lo}, {hi}]; run a sweep to find a bracket"
        )));
    }
    let lo_negative = g_lo < 0.0;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (gm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = 0.5 * (lo + hi);
    Ok(CriticalInterval { delta, spectrum: eig(&es.phi_bar(delta)?)? })
}

/// Refines the first upward crossing found by a sweep.
pub fn locate_delta_crit(es: &ErrorSystem, sweep: &SpectralSweep, tol: f64) -> Result<CriticalInterval> {
    let bracket = sweep
        .first_crossing()
        .ok_or_else(|| Error::Search("no unit-circle crossing".into()))?;
    find_delta_crit(es, bracket, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CycleClass {
    /// Critical eigenvalue +1: period `Δ_crit`.
    PlusOne,
    /// Critical eigenvalue −1: period `2Δ_crit` with mirrored half-cycles.
    MinusOne,
    /// Another eigenvalue is also on or near the unit circle.
    None,
    /// Complex critical pair, reported but not analyzed.
    Degenerate,
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CycleClass::PlusOne => "PLUS_ONE",
            CycleClass::MinusOne => "MINUS_ONE",
            CycleClass::None => "NONE",
            CycleClass::Degenerate => "DEGENERATE",
        })
    }
}

/// One point of the predicted inter-event orbit.
#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub tau: f64,
    /// `X̄(τ)`.
    pub state: Vector,
    /// `e_hpᵀ Q_t e_hp`.
    pub event_value: f64,
}

#[derive(Clone, Debug)]
pub struct LimitCyclePrediction {
    pub delta_crit: f64,
    pub lambda_crit: C64,
    pub cycle_class: CycleClass,
    /// Magnitude of the largest non-critical eigenvalue.
    pub second_magnitude: f64,
    pub period: Option<f64>,
    pub gamma: Option<f64>,
    pub e0: Option<f64>,
    pub v_crit: CVector,
    pub spectrum: EigenDecomposition,
    pub trajectory: Vec<TrajectorySample>,
    /// Whether the predicted orbit crosses the threshold before `Δ_crit`
    /// (after the `Δ_min` lockout), which would trigger an early event.
    pub early_trigger: Option<bool>,
}

impl LimitCyclePrediction {
    /// `+1` for PLUS_ONE, `−1` for MINUS_ONE.
    pub fn sign(&self) -> Option<f64> {
        match self.cycle_class {
            CycleClass::PlusOne => Some(1.0),
            CycleClass::MinusOne => Some(-1.0),
            _ => None,
        }
    }

    /// Event-time state `γ·V_{k1}` of the predicted cycle.
    pub fn event_state(&self) -> Option<Vector> {
        self.gamma.map(|g| self.v_crit.map(|x| x.re) * g)
    }
}

/// `(γ, e_0)` for a real critical direction `v` at interval `delta`.
pub fn critical_amplitude(es: &ErrorSystem, delta: f64, event: &EventConfig, v: &Vector) -> Result<(f64, f64)> {
    let xt = es.transition(delta)? * &es.t_expand * v;
    let e0 = event_value(es, event, &xt).sqrt();
    let scale = xt.norm();
    if !(e0 > 1e-14 * scale) || !e0.is_finite() {
        return Err(Error::Amplitude("event functional is blind to the critical mode (e0 = 0)".into()));
    }
    Ok((event.q_t() / e0, e0))
}

fn event_value(es: &ErrorSystem, event: &EventConfig, xbar_full: &Vector) -> f64 {
    let e = &es.t_event * xbar_full;
    (e.transpose() * event.qt_matrix() * &e)[(0, 0)]
}

pub fn classify_and_predict(
    es: &ErrorSystem,
    delta_crit: f64,
    event: &EventConfig,
    tol_real: f64,
    tol_margin: f64,
) -> Result<LimitCyclePrediction> {
    if event.qt_matrix().nrows() != es.block_dims.1 {
        return Err(Error::Dimension("Q_t does not match the observer dimension".into()));
    }
    let spectrum = eig(&es.phi_bar(delta_crit)?)?;
    let radius = spectrum.spectral_radius();
    if (radius - 1.0).abs() > UNIT_CIRCLE_TOL {
        return Err(Error::Domain(format!(
            "spectral radius {radius} at delta = {delta_crit} is not on the unit circle"
        )));
    }
    let lambda_crit = spectrum.values[0];
    let second_magnitude = spectrum.values.get(1).map_or(0.0, |v| v.norm());
    let real = lambda_crit.im.abs() <= tol_real;
    let cycle_class = if !real {
        CycleClass::Degenerate
    } else if second_magnitude >= 1.0 - tol_margin {
        CycleClass::None
    } else if lambda_crit.re > 0.0 {
        CycleClass::PlusOne
    } else {
        CycleClass::MinusOne
    };
    let v_crit = spectrum.vector(0);

    let mut prediction = LimitCyclePrediction {
        delta_crit,
        lambda_crit,
        cycle_class,
        second_magnitude,
        period: None,
        gamma: None,
        e0: None,
        v_crit,
        spectrum,
        trajectory: Vec::new(),
        early_trigger: None,
    };
    let Some(sign) = prediction.sign() else {
        return Ok(prediction);
    };
    prediction.period = Some(if sign > 0.0 { delta_crit } else { 2.0 * delta_crit });
    let v = prediction.v_crit.map(|x| x.re);
    let (gamma, e0) = critical_amplitude(es, delta_crit, event, &v)?;
    prediction.gamma = Some(gamma);
    prediction.e0 = Some(e0);

    let start = &es.t_expand * (&v * gamma);
    let threshold = event.q_t() * event.q_t();
    let mut early = false;
    for j in 0..TRAJECTORY_SAMPLES {
        let tau = delta_crit * j as f64 / (TRAJECTORY_SAMPLES - 1) as f64;
        let state = es.transition(tau)? * &start;
        let value = event_value(es, event, &state);
        if j + 1 < TRAJECTORY_SAMPLES && tau > event.delta_min() && value >= threshold {
            early = true;
        }
        prediction.trajectory.push(TrajectorySample { tau, state, event_value: value });
    }
    prediction.early_trigger = Some(early);
    Ok(prediction)
}

/// `χ̄ = V⁻¹·x̄`.
pub fn eigen_coordinates(es: &ErrorSystem, basis: &EigenDecomposition, xbar: &Vector) -> Result<CVector> {
    if basis.dim() != es.reduced_dim() || xbar.len() != basis.dim() {
        return Err(Error::Dimension(format!(
            "eigen coordinates: basis {} / state {} / error system {}",
            basis.dim(),
            xbar.len(),
            es.reduced_dim()
        )));
    }
    coordinates(basis, xbar)
}

pub(crate) fn coordinates(basis: &EigenDecomposition, xbar: &Vector) -> Result<CVector> {
    let inv = basis
        .inverse()
        .filter(|_| basis.conditioning < CONDITIONING_LIMIT)
        .ok_or(Error::Conditioning(basis.conditioning))?;
    Ok(inv * xbar.map(|x| C64::new(x, 0.0)))
}

/// Settings for the sweep → bisection → classification pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub delta_min: f64,
    pub delta_max: f64,
    pub steps: usize,
    pub tol_real: f64,
    pub tol_margin: f64,
    pub bisection_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            delta_min: 0.05,
            delta_max: 5.0,
            steps: 400,
            tol_real: DEFAULT_TOL_REAL,
            tol_margin: DEFAULT_TOL_MARGIN,
            bisection_tol: DEFAULT_BISECTION_TOL,
        }
    }
}

/// Sweep followed by a prediction at the first crossing, if there is one.
pub fn analyze(
    es: &ErrorSystem,
    event: &EventConfig,
    options: &AnalysisOptions,
) -> Result<(SpectralSweep, Option<LimitCyclePrediction>)> {
    let sw = sweep(es, options.delta_min, options.delta_max, options.steps)?;
    let Some(bracket) = sw.first_crossing() else {
        return Ok((sw, None));
    };
    let crit = find_delta_crit(es, bracket, options.bisection_tol)?;
    let prediction = classify_and_predict(es, crit.delta, event, options.tol_real, options.tol_margin)?;
    Ok((sw, Some(prediction)))
}
