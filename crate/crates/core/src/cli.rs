//! The `analyze`, `simulate` and `sweep` commands and their output files.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, CycleClass, LimitCyclePrediction, SpectralSweep};
use crate::design::{design_controller, ControlDesign};
use crate::error::{Error, Result};
use crate::errorsys::{assemble, assemble_nominal, ErrorSystem};
use crate::numerics::{eig, Matrix, C64};
use crate::scenario::{Scenario, SweepParam};
use crate::simulator::{
    attach_eigen_coordinates, continuous_closed_loop, measure_cycle, simulate_continuous, simulate_intermittent,
    CycleMeasurement, SimulationStatus, SimulationTrace,
};

pub const NO_CROSSING: &str = "no unit-circle crossing";
/// Number of final events compared against the predicted amplitude.
pub const LATE_EVENTS: usize = 5;

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    // Adding zero turns -0.0 into 0.0.
    format!("{:.16e}", x + 0.0)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(csv_err)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexValue {
    fn from(c: C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

/// Everything derived from a scenario before simulation.
#[derive(Clone, Debug)]
pub struct ScenarioAnalysis {
    pub design: ControlDesign,
    pub error_system: ErrorSystem,
    pub sweep: SpectralSweep,
    pub prediction: Option<LimitCyclePrediction>,
}

pub fn analyze_scenario(scenario: &Scenario) -> Result<ScenarioAnalysis> {
    let design = design_controller(scenario.plant.nominal(), &scenario.weights)?;
    let error_system = assemble(&scenario.plant, &design)?;
    let (sweep, prediction) = analyze(&error_system, &scenario.event, &scenario.analysis)?;
    Ok(ScenarioAnalysis { design, error_system, sweep, prediction })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub tau: Vec<f64>,
    pub state: Vec<Vec<f64>>,
    pub event_value: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkerReport {
    pub delta: f64,
    pub max_abs_eig: f64,
}

/// Contents of `prediction.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PredictionReport {
    pub scenario: String,
    pub cycle_class: CycleClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub delta_crit: Option<f64>,
    pub lambda_crit: Option<ComplexValue>,
    pub second_magnitude: Option<f64>,
    pub period: Option<f64>,
    pub gamma: Option<f64>,
    pub e0: Option<f64>,
    pub q_t: f64,
    pub early_trigger: Option<bool>,
    pub v_crit: Vec<ComplexValue>,
    pub eigenvalues: Vec<ComplexValue>,
    /// Point where the spectral-radius curve meets 1.
    pub marker: Option<MarkerReport>,
    pub trajectory: Option<TrajectoryReport>,
}

impl PredictionReport {
    pub fn new(name: &str, q_t: f64, prediction: Option<&LimitCyclePrediction>) -> Self {
        let Some(p) = prediction else {
            return Self {
                scenario: name.to_string(),
                cycle_class: CycleClass::None,
                reason: Some(NO_CROSSING.to_string()),
                delta_crit: None,
                lambda_crit: None,
                second_magnitude: None,
                period: None,
                gamma: None,
                e0: None,
                q_t,
                early_trigger: None,
                v_crit: Vec::new(),
                eigenvalues: Vec::new(),
                marker: None,
                trajectory: None,
            };
        };
        let reason = match p.cycle_class {
            CycleClass::None => Some("a second eigenvalue is on the unit circle".to_string()),
            CycleClass::Degenerate => Some("complex critical eigenvalue pair".to_string()),
            _ => None,
        };
        let trajectory = (!p.trajectory.is_empty()).then(|| TrajectoryReport {
            tau: p.trajectory.iter().map(|s| s.tau).collect(),
            state: p.trajectory.iter().map(|s| s.state.iter().copied().collect()).collect(),
            event_value: p.trajectory.iter().map(|s| s.event_value).collect(),
        });
        Self {
            scenario: name.to_string(),
            cycle_class: p.cycle_class,
            reason,
            delta_crit: Some(p.delta_crit),
            lambda_crit: Some(p.lambda_crit.into()),
            second_magnitude: Some(p.second_magnitude),
            period: p.period,
            gamma: p.gamma,
            e0: p.e0,
            q_t,
            early_trigger: p.early_trigger,
            v_crit: p.v_crit.iter().map(|&c| c.into()).collect(),
            eigenvalues: p.spectrum.values.iter().map(|&c| c.into()).collect(),
            marker: Some(MarkerReport { delta: p.delta_crit, max_abs_eig: p.spectrum.spectral_radius() }),
            trajectory,
        }
    }
}

/// Writes `sweep.csv`, `loci.csv` and `prediction.json`.
pub fn run_analyze(scenario: &Scenario, out_dir: &Path) -> Result<PredictionReport> {
    fs::create_dir_all(out_dir)?;
    let result = analyze_scenario(scenario)?;
    let matched = assemble_nominal(scenario.plant.nominal(), &result.design)?;
    let opts = &scenario.analysis;
    let reference = crate::analysis::sweep(&matched, opts.delta_min, opts.delta_max, opts.steps)?;

    let mut w = csv_writer(&out_dir.join("sweep.csv"))?;
    w.write_record(["delta", "max_abs_eig_rho0", "max_abs_eig"]).map_err(csv_err)?;
    for i in 0..result.sweep.deltas.len() {
        w.write_record([
            fmt_num(result.sweep.deltas[i]),
            fmt_num(reference.max_magnitudes[i]),
            fmt_num(result.sweep.max_magnitudes[i]),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    let mut w = csv_writer(&out_dir.join("loci.csv"))?;
    w.write_record(["delta", "eig_index", "re", "im"]).map_err(csv_err)?;
    for (d, spectrum) in result.sweep.deltas.iter().zip(&result.sweep.spectra) {
        for (k, v) in spectrum.iter().enumerate() {
            w.write_record([fmt_num(*d), k.to_string(), fmt_num(v.re), fmt_num(v.im)]).map_err(csv_err)?;
        }
    }
    w.flush()?;

    let report = PredictionReport::new(&scenario.name, scenario.event.q_t(), result.prediction.as_ref());
    write_json(&out_dir.join("prediction.json"), &report)?;
    Ok(report)
}

/// Contents of `summary.json`, also one row of `sweep_summary.csv`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub cycle_class: CycleClass,
    pub reason: Option<String>,
    pub delta_crit: Option<f64>,
    pub lambda_crit: Option<ComplexValue>,
    pub gamma: Option<f64>,
    pub predicted_period: Option<f64>,
    pub early_trigger: Option<bool>,
    pub measured_period: Option<f64>,
    pub measured_amplitude: Option<f64>,
    pub mean_interval: Option<f64>,
    pub interval_spread: Option<f64>,
    pub alternating: Option<bool>,
    /// Mean `|χ̄_{k1}|` over the last events.
    pub chi_k1_late: Option<f64>,
    pub period_relative_error: Option<f64>,
    pub gamma_relative_error: Option<f64>,
    pub converged: bool,
    pub event_count: usize,
    pub diverged_at: Option<f64>,
    pub continuous_diverged_at: Option<f64>,
    pub continuous_max_real_eig: f64,
    pub measurement_note: Option<String>,
}

/// Simulation results kept for file output.
pub struct SimulationRun {
    pub summary: RunSummary,
    pub analysis: ScenarioAnalysis,
    pub trace: SimulationTrace,
    pub continuous: SimulationTrace,
    pub cycle: Option<CycleMeasurement>,
}

fn diverged_at(trace: &SimulationTrace) -> Option<f64> {
    match trace.status {
        SimulationStatus::Diverged { time } => Some(time),
        SimulationStatus::Completed => None,
    }
}

pub fn simulate_scenario(scenario: &Scenario) -> Result<SimulationRun> {
    let analysis = analyze_scenario(scenario)?;
    let plant = &scenario.plant;
    let trace = simulate_intermittent(plant, &analysis.design, &scenario.event, &scenario.simulation)?;
    let continuous = simulate_continuous(plant, &analysis.design, &scenario.simulation)?;
    let continuous_max_real_eig = eig(&continuous_closed_loop(plant, &analysis.design))?
        .values
        .iter()
        .map(|v| v.re)
        .fold(f64::NEG_INFINITY, f64::max);

    let trace = match &analysis.prediction {
        Some(p) => match attach_eigen_coordinates(&trace, &p.spectrum) {
            Ok(t) => t,
            Err(Error::Conditioning(_)) => trace,
            Err(e) => return Err(e),
        },
        None => trace,
    };
    let (cycle, note) = match measure_cycle(&trace, scenario.tail_fraction) {
        Ok(c) => (Some(c), None),
        Err(Error::Measurement(m)) => (None, Some(m)),
        Err(e) => return Err(e),
    };

    let p = analysis.prediction.as_ref();
    let gamma = p.and_then(|p| p.gamma);
    let predicted_period = p.and_then(|p| p.period);
    let chi_k1_late = trace.chi.as_ref().and_then(|chi| {
        let late: Vec<usize> = trace.event_steps.iter().rev().take(LATE_EVENTS).copied().collect();
        (late.len() == LATE_EVENTS).then(|| late.iter().map(|&s| chi[s][0].norm()).sum::<f64>() / late.len() as f64)
    });
    let diverged = diverged_at(&trace);
    let converged = diverged.is_none() && cycle.as_ref().is_some_and(|c| c.converged());
    let measured_period = cycle.as_ref().map(|c| c.period);
    let rel = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => Some((a - b).abs() / b.abs()),
        _ => None,
    };
    let summary = RunSummary {
        scenario: scenario.name.clone(),
        cycle_class: p.map_or(CycleClass::None, |p| p.cycle_class),
        reason: if p.is_none() { Some(NO_CROSSING.into()) } else { None },
        delta_crit: p.map(|p| p.delta_crit),
        lambda_crit: p.map(|p| p.lambda_crit.into()),
        gamma,
        predicted_period,
        early_trigger: p.and_then(|p| p.early_trigger),
        measured_period,
        measured_amplitude: cycle.as_ref().map(|c| c.amplitude),
        mean_interval: cycle.as_ref().map(|c| c.mean_interval),
        interval_spread: cycle.as_ref().map(|c| c.relative_spread),
        alternating: cycle.as_ref().map(|c| c.alternating),
        chi_k1_late,
        period_relative_error: rel(measured_period, predicted_period),
        gamma_relative_error: rel(chi_k1_late, gamma),
        converged,
        event_count: trace.events.len(),
        diverged_at: diverged,
        continuous_diverged_at: diverged_at(&continuous),
        continuous_max_real_eig,
        measurement_note: note,
    };
    Ok(SimulationRun { summary, analysis, trace, continuous, cycle })
}

/// Writes `trace.csv`, `events.csv`, `intervals.csv`, `chi.csv`, `phase.csv`
/// and `summary.json`.
pub fn run_simulate(scenario: &Scenario, out_dir: &Path) -> Result<RunSummary> {
    fs::create_dir_all(out_dir)?;
    let run = simulate_scenario(scenario)?;
    let trace = &run.trace;
    let cont = &run.continuous;
    let ny = scenario.plant.actual().n_y();
    let nu = scenario.plant.actual().n_u();

    let mut w = csv_writer(&out_dir.join("trace.csv"))?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=ny).map(|j| format!("y{j}")));
    header.extend((1..=ny).map(|j| format!("y_c{j}")));
    header.extend((1..=nu).map(|j| format!("u{j}")));
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..trace.len() {
        let mut row = vec![fmt_num(trace.times[i])];
        row.extend(trace.y[i].iter().map(|&v| fmt_num(v)));
        match cont.y.get(i) {
            Some(yc) => row.extend(yc.iter().map(|&v| fmt_num(v))),
            None => row.extend(std::iter::repeat_n(String::new(), ny)),
        }
        row.extend(trace.u[i].iter().map(|&v| fmt_num(v)));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;

    let mut w = csv_writer(&out_dir.join("events.csv"))?;
    w.write_record(["i", "t_i"]).map_err(csv_err)?;
    for (i, t) in trace.events.iter().enumerate() {
        w.write_record([i.to_string(), fmt_num(*t)]).map_err(csv_err)?;
    }
    w.flush()?;

    let delta_ref = run.summary.delta_crit;
    let mut w = csv_writer(&out_dir.join("intervals.csv"))?;
    w.write_record(["i", "delta_i", "delta_crit_ref"]).map_err(csv_err)?;
    for (i, d) in trace.intervals.iter().enumerate() {
        w.write_record([i.to_string(), fmt_num(*d), fmt_opt(delta_ref)]).map_err(csv_err)?;
    }
    w.flush()?;

    let mut w = csv_writer(&out_dir.join("chi.csv"))?;
    w.write_record(["t", "abs_chi_k1", "norm_others", "gamma_ref"]).map_err(csv_err)?;
    if let Some(chi) = &trace.chi {
        for (t, c) in trace.times.iter().zip(chi) {
            let others = c.iter().skip(1).map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            w.write_record([fmt_num(*t), fmt_num(c[0].norm()), fmt_num(others), fmt_opt(run.summary.gamma)])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;

    write_phase(scenario, trace, &out_dir.join("phase.csv"))?;
    write_json(&out_dir.join("summary.json"), &run.summary)?;
    Ok(run.summary)
}

/// Output `y_j` against its rate `ẏ_j = (C(Ax + Bu))_j` over the tail window.
fn write_phase(scenario: &Scenario, trace: &SimulationTrace, path: &Path) -> Result<()> {
    let actual = scenario.plant.actual();
    let ny = actual.n_y();
    let ca: Matrix = actual.c() * actual.a();
    let cb: Matrix = actual.c() * actual.b();
    let t_end = trace.times.last().copied().unwrap_or(0.0);
    let start = t_end * (1.0 - scenario.tail_fraction);
    let mut w = csv_writer(path)?;
    let mut header = vec!["t".to_string()];
    for j in 1..=ny {
        header.push(format!("position{j}"));
        header.push(format!("velocity{j}"));
    }
    header.push("event".into());
    w.write_record(&header).map_err(csv_err)?;
    let mut next_event = 0;
    for i in 0..trace.len() {
        while next_event < trace.event_steps.len() && trace.event_steps[next_event] < i {
            next_event += 1;
        }
        if trace.times[i] < start {
            continue;
        }
        let is_event = trace.event_steps.get(next_event) == Some(&i);
        let rate = &ca * &trace.x[i] + &cb * &trace.u[i];
        let mut row = vec![fmt_num(trace.times[i])];
        for j in 0..ny {
            row.push(fmt_num(trace.y[i][j]));
            row.push(fmt_num(rate[j]));
        }
        row.push(u8::from(is_event).to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One `sweep_summary.csv` row: a summary, or the error that stopped the run.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<RunSummary, String>,
}

pub fn run_sweep(scenario: &Scenario, param: SweepParam, values: &[f64], out_dir: &Path) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("no sweep values given".into()));
    }
    if param == SweepParam::B {
        scenario.with_param(param, values[0])?;
    }
    fs::create_dir_all(out_dir)?;
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&value| {
            let outcome = scenario
                .with_param(param, value)
                .and_then(|s| simulate_scenario(&s))
                .map(|run| run.summary)
                .map_err(|e| e.to_string());
            SweepRow { value, outcome }
        })
        .collect();

    let mut w = csv_writer(&out_dir.join("sweep_summary.csv"))?;
    w.write_record([
        param.to_string().as_str(),
        "cycle_class",
        "delta_crit",
        "lambda_re",
        "lambda_im",
        "gamma",
        "predicted_period",
        "measured_period",
        "measured_amplitude",
        "period_relative_error",
        "gamma_relative_error",
        "converged",
        "error",
    ])
    .map_err(csv_err)?;
    for row in &rows {
        let mut rec = vec![fmt_num(row.value)];
        match &row.outcome {
            Ok(s) => rec.extend([
                s.cycle_class.to_string(),
                fmt_opt(s.delta_crit),
                fmt_opt(s.lambda_crit.map(|l| l.re)),
                fmt_opt(s.lambda_crit.map(|l| l.im)),
                fmt_opt(s.gamma),
                fmt_opt(s.predicted_period),
                fmt_opt(s.measured_period),
                fmt_opt(s.measured_amplitude),
                fmt_opt(s.period_relative_error),
                fmt_opt(s.gamma_relative_error),
                s.converged.to_string(),
                String::new(),
            ]),
            Err(msg) => {
                rec.extend(std::iter::repeat_n(String::new(), 10));
                rec.push("false".into());
                rec.push(msg.clone());
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Process exit code for an error: 1 for usage or input problems, 2 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_usage() {
        1
    } else {
        2
    }
}
