use serde::{Deserialize, Serialize};

use super::experiment::{calibrate, detection_from_shots, tomography_shots, DetectionOptions};
use crate::circuits::{condition_on_syndromes, detection_circuit, Device, ErrorSpec, Syndrome};
use crate::kernel::{state_fidelity, DensityMatrix};
use crate::noise::{apply_noisy_circuit, NoiseModel};
use crate::tomography::target_state;
use crate::Result;

/// Preparation error `cos(theta) I - i sin(theta) X`, an X rotation by `2 theta`.
pub fn prep_error(theta: f64) -> ErrorSpec {
    ErrorSpec::x(2.0 * theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessPoint {
    pub theta: f64,
    /// Fraction of all tomography shots in bin `00`.
    pub fraction_00: f64,
    /// `cos^2(theta)`.
    pub predicted_fraction: f64,
    /// Fidelity of the exact conditioned state, before readout.
    pub dense_fidelity: Option<f64>,
    /// Tomographic fidelity of bin `00`; `None` when refused.
    pub fidelity: Option<f64>,
    pub shots_00: usize,
    pub refusal: Option<String>,
}

/// Sweep the preparation error and reconstruct the `00`-conditioned state.
/// Angle `i` uses shot streams with point `i`; all angles share one readout
/// calibration.
pub fn state_prep_robustness(
    device: &Device,
    noise: &NoiseModel,
    thetas: &[f64],
    opts: &DetectionOptions,
    seed: u64,
) -> Result<Vec<RobustnessPoint>> {
    let calibration = calibrate(noise, opts.calibration_shots, seed)?;
    let target = target_state(Syndrome::new(false, false)).to_density();
    thetas
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let error = prep_error(theta);
            let circuit = detection_circuit(device, &error, None)?;
            let state = apply_noisy_circuit(&circuit, noise, &DensityMatrix::zero(4)?)?;
            let dense_fidelity = condition_on_syndromes(&state)?[0]
                .code_state
                .as_ref()
                .map(|rho| state_fidelity(rho, &target))
                .transpose()?;
            let shots = tomography_shots(device, noise, &error, opts.shots_per_setting, seed, i)?;
            let run =
                detection_from_shots(&error, shots, noise, &calibration, &opts.tomography, seed)?;
            let bin = &run.bins[0];
            Ok(RobustnessPoint {
                theta,
                fraction_00: run.populations[0],
                predicted_fraction: theta.cos().powi(2),
                dense_fidelity,
                fidelity: bin.result.as_ref().map(|r| r.fidelity),
                shots_00: bin.shots,
                refusal: bin.error.clone(),
            })
        })
        .collect()
}
