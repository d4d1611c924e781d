//! Run configuration: one optional section per subcommand, unknown keys
//! rejected everywhere.

use std::path::{Path, PathBuf};

use dicke_core::dicke::{dicke, ghz, navigate, w_state, DickeSpec, NavigationStep};
use dicke_core::fock::{Calibration, CalibrationGrid, LossConfig, SpdcConfig, simulate_experiment};
use dicke_core::lms::Strategy;
use dicke_core::qstate::{Plane, QuantumState, QubitDensity, StateDocument};
use dicke_core::witness::SeesawOptions;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A register built from a recipe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Dicke { n: usize, m: usize },
    W { n: usize },
    Ghz { n: usize },
    /// `p ρ + (1 - p) I/2^N`.
    Werner { of: Box<StateSpec>, p: f64 },
    /// Heralding measurements on `of`; surviving qubits keep their order.
    Navigated { of: Box<StateSpec>, steps: Vec<NavigationStep> },
    /// A saved state document.
    File { path: PathBuf },
    /// `rho_sim` at the selected point of a calibration file.
    Calibrated { path: PathBuf },
    /// `rho_sim` of the source model at the given knobs.
    Simulated {
        #[serde(default)]
        spdc: SpdcConfig,
        loss: LossConfig,
    },
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Dicke { n: 6, m: 3 }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn load_calibration(path: &Path) -> Result<Calibration, CliError> {
    Calibration::from_json(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl StateSpec {
    pub fn build(&self) -> Result<QubitDensity, CliError> {
        let num = |e: &dyn std::fmt::Display| CliError::Numerical(e.to_string());
        let cfg = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
        match self {
            StateSpec::Dicke { n, m } => {
                Ok(dicke(DickeSpec::new(*n, *m).map_err(|e| cfg(&e))?).map_err(|e| cfg(&e))?.to_density())
            }
            StateSpec::W { n } => Ok(w_state(*n).map_err(|e| cfg(&e))?.to_density()),
            StateSpec::Ghz { n } => Ok(ghz(*n).map_err(|e| cfg(&e))?.to_density()),
            StateSpec::Werner { of, p } => {
                let inner = of.build()?;
                let mixed = QubitDensity::maximally_mixed(inner.num_qubits()).map_err(|e| cfg(&e))?;
                if !(0.0..=1.0).contains(p) {
                    return Err(CliError::Config(format!("werner weight {p} outside [0, 1]")));
                }
                QubitDensity::mixture(&[(*p, &inner), (1.0 - p, &mixed)]).map_err(|e| cfg(&e))
            }
            StateSpec::Navigated { of, steps } => {
                let (post, _) = navigate(&of.build()?, steps).map_err(|e| cfg(&e))?;
                Ok(post)
            }
            StateSpec::File { path } => StateDocument::from_json(&read(path)?)
                .and_then(|d| d.to_density())
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
            StateSpec::Calibrated { path } => Ok(load_calibration(path)?.simulate().map_err(|e| num(&e))?.rho_sim),
            StateSpec::Simulated { spdc, loss } => {
                spdc.validate().map_err(|e| cfg(&e))?;
                loss.validate().map_err(|e| cfg(&e))?;
                Ok(simulate_experiment(spdc, loss).map_err(|e| num(&e))?.rho_sim)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    pub state: StateSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub spdc: SpdcConfig,
    pub loss: LossConfig,
    /// Runs this grid and simulates its selected point instead of `spdc`/`loss`.
    pub sweep: Option<CalibrationGrid>,
    /// Simulates the selected point of a saved calibration.
    pub calibration: Option<PathBuf>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { spdc: SpdcConfig::default(), loss: LossConfig::lossless(), sweep: None, calibration: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessSection {
    pub state: StateSpec,
    pub alphas: Vec<f64>,
}

impl Default for WitnessSection {
    fn default() -> Self {
        Self { state: StateSpec::default(), alphas: vec![0.0, -3.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundSection {
    pub n: usize,
    pub alphas: Vec<f64>,
    pub seesaw: SeesawOptions,
    /// State whose witness value is tabulated next to the bound;
    /// defaults to `D_N^{(⌊N/2⌋)}`.
    pub state: Option<StateSpec>,
}

impl Default for BoundSection {
    fn default() -> Self {
        Self { n: 6, alphas: vec![0.0], seesaw: SeesawOptions::default(), state: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub state: StateSpec,
    pub plane: Plane,
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self { state: StateSpec::default(), plane: Plane::Xz, start: 0.0, end: std::f64::consts::PI, points: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LmsSection {
    pub target: StateSpec,
    pub label: String,
    pub strategy: Strategy,
}

impl Default for LmsSection {
    fn default() -> Self {
        Self { target: StateSpec::default(), label: "D6_3".into(), strategy: Strategy::Symmetric }
    }
}

/// Where sampled counts come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    State { state: StateSpec },
    /// Threshold detection of the source model.
    Fock {
        #[serde(default)]
        spdc: SpdcConfig,
        loss: LossConfig,
    },
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec::State { state: StateSpec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    pub source: SourceSpec,
    pub target: StateSpec,
    pub label: String,
    pub strategy: Strategy,
    pub events: u64,
    pub seed: u64,
}

impl Default for SampleSection {
    fn default() -> Self {
        Self {
            source: SourceSpec::default(),
            target: StateSpec::default(),
            label: "D6_3".into(),
            strategy: Strategy::Symmetric,
            events: 100_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolsSection {
    pub state: StateSpec,
    /// Kept pair for open-destination teleportation (0-based).
    pub keep: [usize; 2],
    pub rounds: u64,
    pub seed: u64,
}

impl Default for ProtocolsSection {
    fn default() -> Self {
        Self { state: StateSpec::default(), keep: [4, 5], rounds: 10_000, seed: 0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    /// Pump repetition rate used for `rate = rep_rate × p_event`.
    pub rep_rate_hz: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub state: StateSection,
    pub simulate: SimulateSection,
    pub witness: WitnessSection,
    pub bound: BoundSection,
    pub scan: ScanSection,
    pub lms: LmsSection,
    pub sample: SampleSection,
    pub protocols: ProtocolsSection,
    pub compare: CompareSection,
}

impl RunConfig {
    /// Parses a JSON config; errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => Self::from_json(&read(p)?).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
                other => other,
            }),
            None => Ok(Self::default()),
        }
    }
}
