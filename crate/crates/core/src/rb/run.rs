use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{error_per_clifford, fit_decay, DecayFit};
use super::sequence::RbSequence;
use crate::circuits::Device;
use crate::kernel::DensityMatrix;
use crate::noise::{apply_noisy_circuit, NoiseModel};
use crate::rng::{stream, tag};
use crate::{Error, Result};

/// One executed sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbSample {
    pub length: usize,
    pub seq_index: usize,
    pub p0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbDecay {
    pub n_qubits: usize,
    pub lengths: Vec<usize>,
    /// Mean ground-state population per length.
    pub mean_p0: Vec<f64>,
    pub samples: Vec<RbSample>,
    pub fit: DecayFit,
    pub error_per_clifford: f64,
    pub error_std: f64,
}

/// Simulated RB on `device` (one or two qubits) under `noise`.
///
/// `P_0` is the exact population of `|0...0>` after the recovery element,
/// without readout error. Sequence `(i, s)` draws from stream `[RB, i, s]`
/// of `seed`.
pub fn run_rb(
    device: &Device,
    noise: &NoiseModel,
    lengths: &[usize],
    n_sequences: usize,
    seed: u64,
) -> Result<RbDecay> {
    let n = device.n_qubits();
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "RB runs on 1 or 2 qubits, not {n}"
        )));
    }
    if n_sequences == 0 {
        return Err(Error::InvalidArgument(
            "RB needs at least one sequence per length".into(),
        ));
    }
    let jobs: Vec<(usize, usize)> = (0..lengths.len())
        .flat_map(|i| (0..n_sequences).map(move |s| (i, s)))
        .collect();
    let start = DensityMatrix::zero(n)?;
    let samples = jobs
        .par_iter()
        .map(|&(i, s)| {
            let mut rng = stream(seed, &[tag::RB, i as u64, s as u64]);
            let circuit = RbSequence::sample(n, lengths[i], &mut rng)?.circuit(device)?;
            let out = apply_noisy_circuit(&circuit, noise, &start)?;
            Ok(RbSample {
                length: lengths[i],
                seq_index: s,
                p0: out.probabilities()[0],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_decay(&samples.iter().map(|s| (s.length, s.p0)).collect::<Vec<_>>())?;
    let mean_p0 = (0..lengths.len())
        .map(|i| {
            samples[i * n_sequences..(i + 1) * n_sequences]
                .iter()
                .map(|s| s.p0)
                .sum::<f64>()
                / n_sequences as f64
        })
        .collect();
    let d = (1usize << n) as f64;
    Ok(RbDecay {
        n_qubits: n,
        lengths: lengths.to_vec(),
        mean_p0,
        samples,
        error_per_clifford: error_per_clifford(fit.alpha, n),
        error_std: fit.alpha_std() * (1.0 - 1.0 / d),
        fit,
    })
}

/// Two-qubit RB on the native pair `(control, target)` of `device`.
pub fn run_pair_rb(
    device: &Device,
    noise: &NoiseModel,
    pair: (usize, usize),
    lengths: &[usize],
    n_sequences: usize,
    seed: u64,
) -> Result<RbDecay> {
    device.topology.check_pair(pair.0, pair.1)?;
    let qubits = [pair.0, pair.1];
    run_rb(
        &device.restricted(&qubits)?,
        &noise.restricted(&qubits)?,
        lengths,
        n_sequences,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{lambda_from_infidelity, DepolarizingParams};

    #[test]
    fn noiseless_rb_has_no_error() {
        let dev = Device::default();
        let decay = run_pair_rb(&dev, &NoiseModel::off(4), (0, 1), &[1, 4, 8, 16], 5, 1).unwrap();
        assert!(decay.samples.iter().all(|s| (s.p0 - 1.0).abs() < 1e-10));
        assert_eq!(decay.fit.alpha, 1.0);
        assert_eq!(decay.error_per_clifford, 0.0);
    }

    #[test]
    fn single_qubit_depolarizing_decay() {
        // Depolarizing only: every Clifford is one pulse, so alpha = 1 - lambda exactly.
        let dev = Device::default().restricted(&[0]).unwrap();
        let lambda = lambda_from_infidelity(1, 0.002);
        let noise = NoiseModel {
            depolarizing: Some(DepolarizingParams::new(lambda, vec![]).unwrap()),
            ..NoiseModel::off(1)
        };
        let decay = run_rb(&dev, &noise, &[1, 25, 50, 100], 8, 3).unwrap();
        let m100 = decay.mean_p0[3];
        let analytic = 0.5 + 0.5 * (1.0 - lambda).powi(101);
        assert!((m100 - analytic).abs() < 1e-9, "{m100} vs {analytic}");
        assert!((decay.error_per_clifford - 0.002).abs() < 1e-6);
    }
}
