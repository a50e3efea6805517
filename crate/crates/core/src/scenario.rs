//! JSON scenario files and their resolution into library types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisOptions;
use crate::design::DesignWeights;
use crate::error::{Error, Result};
use crate::model::{make_scenario, DeviationTriple, EventConfig, ModelFile, PlantScenario, StateSpaceModel};
use crate::numerics::{matrix_from_rows, Matrix, Vector};
use crate::simulator::SimulationConfig;

pub const DEFAULT_DURATION: f64 = 60.0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.3;
/// Initial displacement placed on every measured state when `x0` is absent.
pub const DEFAULT_OFFSET: f64 = 0.1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub nominal: ModelSource,
    pub deviation: DeviationSpec,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_map: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<EventSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSpec>,
}

/// Inline model or a path to a model file, relative to the scenario file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Inline(ModelFile),
    File(ModelReference),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelReference {
    pub file: String,
}

/// Either an input-gain ratio (`B̃₁ = (1 − gain)·B̂`) or explicit matrices in
/// actual-state coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeviationSpec {
    Gain(GainDeviation),
    Matrices(MatrixDeviation),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainDeviation {
    pub gain: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDeviation {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

/// A scalar means that multiple of the identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

impl MatrixSpec {
    fn resolve(&self, size: usize, what: &str) -> Result<Matrix> {
        let m = match self {
            MatrixSpec::Scalar(s) => Matrix::identity(size, size) * *s,
            MatrixSpec::Matrix(rows) => matrix_from_rows(rows).map_err(|e| Error::Config(format!("{what}: {e}")))?,
        };
        if m.shape() != (size, size) {
            return Err(Error::Config(format!("{what} must be {size}x{size}")));
        }
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::Config(format!("{what} has non-finite entries")));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    #[serde(rename = "Qc", default, skip_serializing_if = "Option::is_none")]
    pub qc: Option<MatrixSpec>,
    #[serde(rename = "Rc", default, skip_serializing_if = "Option::is_none")]
    pub rc: Option<MatrixSpec>,
    #[serde(rename = "Qo", default, skip_serializing_if = "Option::is_none")]
    pub qo: Option<MatrixSpec>,
    #[serde(rename = "Ro", default, skip_serializing_if = "Option::is_none")]
    pub ro: Option<MatrixSpec>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSpec {
    #[serde(rename = "Q_t", default, skip_serializing_if = "Option::is_none")]
    pub qt_matrix: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xo0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_real: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_margin: Option<f64>,
}

/// Parameters that `ic sweep` can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Rho,
    QT,
    B,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(SweepParam::Rho),
            "q_t" => Ok(SweepParam::QT),
            "b" => Ok(SweepParam::B),
            other => Err(Error::Config(format!("unknown sweep parameter '{other}' (expected rho, q_t or b)"))),
        }
    }
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParam::Rho => "rho",
            SweepParam::QT => "q_t",
            SweepParam::B => "b",
        })
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario: {e}")))
    }

    /// Copy with one parameter replaced.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Self> {
        let mut out = self.clone();
        match param {
            SweepParam::Rho => out.rho = value,
            SweepParam::QT => out.event.get_or_insert_with(EventSpec::default).q_t = Some(value),
            SweepParam::B => match &mut out.deviation {
                DeviationSpec::Gain(g) => g.gain = value,
                DeviationSpec::Matrices(_) => {
                    return Err(Error::Config(
                        "parameter b needs a gain deviation ({\"gain\": b})".into(),
                    ))
                }
            },
        }
        Ok(out)
    }
}

/// A scenario resolved into validated library objects.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub file: ScenarioFile,
    pub base_dir: Option<PathBuf>,
    pub plant: PlantScenario,
    pub weights: DesignWeights,
    pub event: EventConfig,
    pub simulation: SimulationConfig,
    pub tail_fraction: f64,
    pub analysis: AnalysisOptions,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let file = ScenarioFile::from_json(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::resolve(file, path.parent().map(Path::to_path_buf))
    }

    pub fn resolve(file: ScenarioFile, base_dir: Option<PathBuf>) -> Result<Self> {
        let cfg = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(format!("scenario '{}': {other}", file.name)),
        };
        let nominal = load_nominal(&file.nominal, base_dir.as_deref()).map_err(cfg)?;
        let (nh, n_u, n_y) = (nominal.n(), nominal.n_u(), nominal.n_y());
        let deviation = match &file.deviation {
            DeviationSpec::Gain(g) => DeviationTriple::gain(&nominal, g.gain),
            DeviationSpec::Matrices(m) => DeviationTriple {
                a: matrix_from_rows(&m.a).map_err(cfg)?,
                b: matrix_from_rows(&m.b).map_err(cfg)?,
                c: matrix_from_rows(&m.c).map_err(cfg)?,
            },
        };
        let n = deviation.a.nrows();
        let state_map = match &file.state_map {
            Some(rows) => matrix_from_rows(rows).map_err(cfg)?,
            None if n == nh => Matrix::identity(nh, nh),
            None => return Err(Error::Config("state_map is required when the deviation changes the state size".into())),
        };
        let plant = make_scenario(nominal, deviation, file.rho, state_map).map_err(cfg)?;

        let w = file.weights.clone().unwrap_or_default();
        let pick = |m: &Option<MatrixSpec>, size: usize, what: &str| {
            m.as_ref().map_or(Ok(Matrix::identity(size, size)), |m| m.resolve(size, what))
        };
        let weights = DesignWeights {
            qc: pick(&w.qc, nh, "Qc")?,
            rc: pick(&w.rc, n_u, "Rc")?,
            qo: pick(&w.qo, nh, "Qo")?,
            ro: pick(&w.ro, n_y, "Ro")?,
        };

        let ev = file.event.clone().unwrap_or_default();
        let defaults = EventConfig::default_for(nh);
        let event = EventConfig::new(
            pick(&ev.qt_matrix, nh, "Q_t")?,
            ev.q_t.unwrap_or(defaults.q_t()),
            ev.delta_min.unwrap_or(defaults.delta_min()),
        )
        .map_err(cfg)?;

        let sim = file.simulation.clone().unwrap_or_default();
        let actual_n = plant.actual().n();
        let x0 = match &sim.x0 {
            Some(v) => Vector::from_vec(v.clone()),
            None => plant.actual().c().transpose() * Vector::from_element(n_y, DEFAULT_OFFSET),
        };
        if x0.len() != actual_n {
            return Err(Error::Config(format!("x0 must have {actual_n} entries")));
        }
        let xo0 = sim.xo0.as_ref().map(|v| Vector::from_vec(v.clone()));
        if xo0.as_ref().is_some_and(|v| v.len() != nh) {
            return Err(Error::Config(format!("xo0 must have {nh} entries")));
        }
        let simulation = SimulationConfig {
            x0,
            xo0,
            duration: sim.duration.unwrap_or(DEFAULT_DURATION),
            dt: sim.dt.unwrap_or(DEFAULT_DT),
        };
        let tail_fraction = sim.tail_fraction.unwrap_or(DEFAULT_TAIL_FRACTION);
        if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
            return Err(Error::Config("tail_fraction must lie in (0, 1]".into()));
        }

        let mut analysis = AnalysisOptions::default();
        if let Some(s) = &file.sweep {
            analysis.delta_min = s.delta_min.unwrap_or(analysis.delta_min);
            analysis.delta_max = s.delta_max.unwrap_or(analysis.delta_max);
            analysis.steps = s.steps.unwrap_or(analysis.steps);
        }
        if let Some(a) = &file.analysis {
            analysis.tol_real = a.tol_real.unwrap_or(analysis.tol_real);
            analysis.tol_margin = a.tol_margin.unwrap_or(analysis.tol_margin);
        }
        if !(analysis.delta_min > 0.0 && analysis.delta_min < analysis.delta_max) || analysis.steps < 2 {
            return Err(Error::Config("sweep needs 0 < delta_min < delta_max and steps >= 2".into()));
        }

        Ok(Self {
            name: file.name.clone(),
            file,
            base_dir,
            plant,
            weights,
            event,
            simulation,
            tail_fraction,
            analysis,
        })
    }

    /// The same scenario with one parameter replaced.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Self> {
        Self::resolve(self.file.with_param(param, value)?, self.base_dir.clone())
    }

    /// Overrides the simulation step and/or duration.
    pub fn with_timing(mut self, dt: Option<f64>, duration: Option<f64>) -> Self {
        if let Some(dt) = dt {
            self.simulation.dt = dt;
        }
        if let Some(d) = duration {
            self.simulation.duration = d;
        }
        self
    }
}

fn load_nominal(source: &ModelSource, base_dir: Option<&Path>) -> Result<StateSpaceModel> {
    match source {
        ModelSource::Inline(m) => m.to_model(),
        ModelSource::File(r) => {
            let path = base_dir.map_or_else(|| PathBuf::from(&r.file), |d| d.join(&r.file));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read model {}: {e}", path.display())))?;
            let file: ModelFile = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            file.to_model()
        }
    }
}
