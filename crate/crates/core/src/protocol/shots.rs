use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::circuits::{detection_circuit, Device, ErrorSpec, Syndrome, Q2, Q4};
use crate::kernel::linalg;
use crate::kernel::DensityMatrix;
use crate::noise::{apply_noisy_circuit, NoiseModel, ReadoutModel};
use crate::rng::{stream, tag, SimRng};
use crate::tomography::MeasSetting;
use crate::{Error, Result};

/// One single-shot readout of all four channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// Scalar response of channels M1..M4.
    pub values: [f64; 4],
    /// Tomography setting, 0 when none was applied.
    pub setting: usize,
    /// Sweep point or other experiment index.
    pub point: usize,
}

impl ShotRecord {
    pub fn syndrome(&self, readout: &ReadoutModel) -> Result<Syndrome> {
        Ok(Syndrome::from_bits(
            readout.binarize(self.values[Q2], Q2)?,
            readout.binarize(self.values[Q4], Q4)?,
        ))
    }
}

/// Probabilities of the 16 outcomes of the detection circuit.
pub fn outcome_probabilities(
    device: &Device,
    noise: &NoiseModel,
    error: &ErrorSpec,
    setting: Option<MeasSetting>,
) -> Result<Vec<f64>> {
    let rotations = setting
        .map(|s| s.gates(device.durations.single_qubit_ns))
        .transpose()?;
    let circuit = detection_circuit(device, error, rotations.as_ref())?;
    let out = apply_noisy_circuit(&circuit, noise, &DensityMatrix::zero(device.n_qubits())?)?;
    Ok(out
        .probabilities()
        .into_iter()
        .map(|p| p.max(0.0))
        .collect())
}

/// Draw `n_shots` outcomes from `probabilities` and pass each bit through readout.
pub fn sample_shots(
    probabilities: &[f64],
    readout: &ReadoutModel,
    n_shots: usize,
    setting: usize,
    point: usize,
    rng: &mut SimRng,
) -> Result<Vec<ShotRecord>> {
    if probabilities.len() != 16 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            got: probabilities.len(),
        });
    }
    let dist = WeightedIndex::new(probabilities)
        .map_err(|e| Error::Numerical(format!("outcome distribution: {e}")))?;
    (0..n_shots)
        .map(|_| {
            let outcome = dist.sample(rng);
            let mut values = [0.0; 4];
            for (q, v) in values.iter_mut().enumerate() {
                let bit = linalg::bit(outcome, q, 4) as u8;
                *v = readout.sample_readout(bit, q, rng)?;
            }
            Ok(ShotRecord {
                values,
                setting,
                point,
            })
        })
        .collect()
}

/// Simulated shots of the detection circuit with `error` on Q1.
///
/// Shots for `(point, setting)` come from stream `[SHOTS, point, setting]` of `seed`.
/// With ideal readout every value sits on its class mean.
pub fn run_shots(
    device: &Device,
    noise: &NoiseModel,
    error: &ErrorSpec,
    n_shots: usize,
    setting: Option<MeasSetting>,
    seed: u64,
    point: usize,
) -> Result<Vec<ShotRecord>> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    let probs = outcome_probabilities(device, noise, error, setting)?;
    let s = setting.map_or(0, |s| s.index());
    let mut rng = stream(seed, &[tag::SHOTS, point as u64, s as u64]);
    sample_shots(&probs, &noise.readout, n_shots, s, point, &mut rng)
}

/// Shot counts per syndrome bin, ordered as [`Syndrome::ALL`].
pub fn bin_counts(shots: &[ShotRecord], readout: &ReadoutModel) -> Result<[usize; 4]> {
    let mut counts = [0; 4];
    for shot in shots {
        counts[shot.syndrome(readout)?.index()] += 1;
    }
    Ok(counts)
}

/// Fraction of shots in each syndrome bin.
pub fn bin_syndromes(shots: &[ShotRecord], readout: &ReadoutModel) -> Result<[f64; 4]> {
    if shots.is_empty() {
        return Err(Error::InsufficientStatistics("no shots to bin".into()));
    }
    let counts = bin_counts(shots, readout)?;
    let n = shots.len() as f64;
    Ok(counts.map(|c| c as f64 / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_shots_sit_on_class_means() {
        let dev = Device::default();
        let noise = NoiseModel::off(4);
        let shots = run_shots(
            &dev,
            &noise,
            &ErrorSpec::z(std::f64::consts::PI),
            200,
            None,
            1,
            0,
        )
        .unwrap();
        assert!(shots
            .iter()
            .all(|s| s.values.iter().all(|v| v.abs() == 1.0)));
        assert_eq!(
            bin_syndromes(&shots, &noise.readout).unwrap(),
            [0.0, 0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn split_populations_are_exact() {
        let readout = ReadoutModel::ideal(4);
        let shot = |m2: f64, m4: f64| ShotRecord {
            values: [-1.0, m2, -1.0, m4],
            setting: 0,
            point: 0,
        };
        let shots = vec![
            shot(-1.0, -1.0),
            shot(1.0, 1.0),
            shot(-1.0, -1.0),
            shot(1.0, 1.0),
        ];
        assert_eq!(
            bin_syndromes(&shots, &readout).unwrap(),
            [0.5, 0.0, 0.0, 0.5]
        );
        assert!(bin_syndromes(&[], &readout).is_err());
    }

    #[test]
    fn shots_are_reproducible() {
        let dev = Device::default();
        let noise = NoiseModel::measured_coherence();
        let a = run_shots(
            &dev,
            &noise,
            &ErrorSpec::y(1.0),
            50,
            MeasSetting::new(3).ok(),
            9,
            2,
        )
        .unwrap();
        let b = run_shots(
            &dev,
            &noise,
            &ErrorSpec::y(1.0),
            50,
            MeasSetting::new(3).ok(),
            9,
            2,
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.setting == 3 && s.point == 2));
    }
}
