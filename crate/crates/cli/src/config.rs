//! Experiment configuration: TOML file values overridden by command-line flags.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sublattice::circuits::Device;
use sublattice::noise::{DepolarizingParams, NoiseModel, QubitNoiseParams, ReadoutModel};
use sublattice::protocol::{SweepAxis, DEFAULT_SWEEP_POINTS};
use sublattice::rb::{
    calibrate_ecr_depolarizing, calibrate_single_qubit_depolarizing, MEASURED_CLIFFORD_ERRORS,
    MEASURED_SINGLE_QUBIT_ERROR,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseBase {
    Off,
    #[default]
    Paper,
}

/// Noise section. Unset fields take the base model's values; with
/// `model = "paper"` unset depolarizing strengths are calibrated against RB.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub model: NoiseBase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_us: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2_echo_us: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment_fidelities: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_qubit_depolarizing: Option<f64>,
    /// One strength per native pair, in device order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ecr_depolarizing: Option<Vec<f64>>,
}

impl NoiseConfig {
    pub fn off() -> Self {
        Self {
            model: NoiseBase::Off,
            ..Self::default()
        }
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }

    fn check_len(name: &str, v: &Option<Vec<f64>>) -> CliResult<()> {
        match v {
            Some(v) if v.len() != 4 => Err(CliError::Config(format!(
                "{name} needs 4 values, got {}",
                v.len()
            ))),
            _ => Ok(()),
        }
    }

    fn check_positive(name: &str, v: &Option<Vec<f64>>) -> CliResult<()> {
        Self::check_len(name, v)?;
        if v.iter().flatten().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(CliError::Config(format!("{name} values must be positive")));
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        Self::check_positive("t1_us", &self.t1_us)?;
        Self::check_positive("t2_echo_us", &self.t2_echo_us)?;
        Self::check_positive("assignment_fidelities", &self.assignment_fidelities)?;
        Self::check_len("ecr_depolarizing", &self.ecr_depolarizing)
    }

    pub fn build(&self, device: &Device) -> CliResult<NoiseModel> {
        self.validate()?;
        let mut model = match self.model {
            NoiseBase::Off => NoiseModel::off(4),
            NoiseBase::Paper => NoiseModel::measured_coherence(),
        };
        if self.t1_us.is_some() || self.t2_echo_us.is_some() {
            let base = model
                .coherence
                .clone()
                .unwrap_or_else(QubitNoiseParams::measured);
            model.coherence = Some(QubitNoiseParams::new(
                self.t1_us.clone().unwrap_or(base.t1_us),
                self.t2_echo_us.clone().unwrap_or(base.t2_echo_us),
            )?);
        }
        if let Some(f) = &self.assignment_fidelities {
            model.readout = ReadoutModel::from_fidelities(f)?;
        }
        let calibrate = self.model == NoiseBase::Paper;
        let single = match self.single_qubit_depolarizing {
            Some(s) => Some(s),
            None if calibrate => Some(calibrate_single_qubit_depolarizing(
                device,
                &model,
                MEASURED_SINGLE_QUBIT_ERROR,
            )?),
            None => None,
        };
        if single.is_none() && self.ecr_depolarizing.is_none() {
            return Ok(model);
        }
        model.depolarizing = Some(DepolarizingParams::new(single.unwrap_or(0.0), Vec::new())?);
        let pairs = &device.topology.ecr_pairs;
        let ecr = match &self.ecr_depolarizing {
            Some(l) => pairs.iter().copied().zip(l.iter().copied()).collect(),
            None if calibrate => {
                calibrate_ecr_depolarizing(device, &model, &MEASURED_CLIFFORD_ERRORS)?
                    .iter()
                    .map(|c| (c.pair, c.lambda))
                    .collect()
            }
            None => pairs.iter().map(|&p| (p, 0.0)).collect(),
        };
        model.depolarizing = Some(DepolarizingParams::new(single.unwrap_or(0.0), ecr)?);
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectConfig {
    pub error: String,
    /// Readout calibration shots per basis state.
    pub calibration_shots: usize,
    pub bootstrap: usize,
    pub histogram_bins: usize,
    pub min_bin_shots: usize,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            error: "none".into(),
            calibration_shots: 1200,
            bootstrap: 0,
            histogram_bins: 40,
            min_bin_shots: sublattice::tomography::DEFAULT_MIN_BIN_SHOTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: SweepAxis::Y,
            points: DEFAULT_SWEEP_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PanelConfig {
    pub errors: Vec<String>,
    /// Only the closed-form probabilities, no simulation.
    pub ideal: bool,
    /// Renormalize with X, Y and Z calibration sweeps.
    pub renormalize: bool,
}

impl Default for PanelConfig {
    fn default() -> Self {
        Self {
            errors: [
                "Y60", "X60", "X60Y60", "X60Y120", "X120Y60", "X120Y120", "R", "H",
            ]
            .map(String::from)
            .to_vec(),
            ideal: false,
            renormalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbConfig {
    /// Native pairs to benchmark; empty means all.
    pub pairs: Vec<[usize; 2]>,
    pub lengths: Vec<usize>,
    pub sequences: usize,
}

impl Default for RbConfig {
    fn default() -> Self {
        Self {
            pairs: Vec::new(),
            lengths: vec![1, 3, 6, 10, 15, 22, 32, 45],
            sequences: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustnessConfig {
    pub thetas: Vec<f64>,
    pub calibration_shots: usize,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        Self {
            thetas: (0..=8)
                .map(|i| -FRAC_PI_2 + FRAC_PI_2 * i as f64 / 4.0)
                .collect(),
            calibration_shots: 1200,
        }
    }
}

/// Everything that determines a run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Overrides the per-command shot count when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub noise: NoiseConfig,
    pub detect: DetectConfig,
    pub sweep: SweepConfig,
    pub panel: PanelConfig,
    pub rb: RbConfig,
    pub robustness: RobustnessConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            shots: None,
            out: None,
            noise: NoiseConfig::default(),
            detect: DetectConfig::default(),
            sweep: SweepConfig::default(),
            panel: PanelConfig::default(),
            rb: RbConfig::default(),
            robustness: RobustnessConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn shots_or(&self, default: usize) -> CliResult<usize> {
        match self.shots.unwrap_or(default) {
            0 => Err(CliError::Config("shots must be at least 1".into())),
            n => Ok(n),
        }
    }
}
