use serde::{Deserialize, Serialize};

use super::decoherence::QubitNoiseParams;
use super::readout::ReadoutModel;
use crate::circuits::{Circuit, Device, GateKind};
use crate::kernel::{apply_channel, DensityMatrix, KrausChannel, QuantumState, UnitaryMatrix};
use crate::{Error, Result};

/// Depolarizing strengths `lambda`, where the channel is
/// `rho -> (1 - lambda) rho + lambda I/d` on the gate's qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingParams {
    /// After every pulsed single-qubit gate.
    pub single_qubit: f64,
    /// After every ECR, keyed by `(control, target)`.
    pub ecr: Vec<((usize, usize), f64)>,
}

impl DepolarizingParams {
    pub fn new(single_qubit: f64, ecr: Vec<((usize, usize), f64)>) -> Result<Self> {
        let p = Self { single_qubit, ecr };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let values = std::iter::once(self.single_qubit).chain(self.ecr.iter().map(|e| e.1));
        for v in values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "depolarizing strength {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn ecr_lambda(&self, control: usize, target: usize) -> Result<f64> {
        self.ecr
            .iter()
            .find(|e| e.0 == (control, target))
            .map(|e| e.1)
            .ok_or(Error::Disconnected(control, target))
    }
}

/// Convert an average gate infidelity on `n_qubits` to a depolarizing `lambda`.
pub fn lambda_from_infidelity(n_qubits: usize, r: f64) -> f64 {
    let d = (1usize << n_qubits) as f64;
    r * d / (d - 1.0)
}

/// Average gate infidelity of a depolarizing channel with strength `lambda`.
pub fn infidelity_from_lambda(n_qubits: usize, lambda: f64) -> f64 {
    let d = (1usize << n_qubits) as f64;
    lambda * (d - 1.0) / d
}

/// Full error model: optional decoherence, optional gate depolarizing and readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub coherence: Option<QubitNoiseParams>,
    pub depolarizing: Option<DepolarizingParams>,
    pub readout: ReadoutModel,
}

impl NoiseModel {
    /// Ideal gates and perfect readout.
    pub fn off(n_qubits: usize) -> Self {
        Self {
            coherence: None,
            depolarizing: None,
            readout: ReadoutModel::ideal(n_qubits),
        }
    }

    /// Measured coherence times and assignment fidelities, no gate depolarizing.
    pub fn measured_coherence() -> Self {
        Self {
            coherence: Some(QubitNoiseParams::measured()),
            depolarizing: None,
            readout: ReadoutModel::measured(),
        }
    }

    /// Measured coherence and readout, with gate depolarizing calibrated so
    /// simulated RB reproduces the measured single-qubit error and errors per
    /// two-qubit Clifford. Pairs whose decoherence floor already exceeds the
    /// measured error get no ECR depolarizing.
    pub fn measured(device: &Device) -> Result<Self> {
        let mut model = Self::measured_coherence();
        let single = crate::rb::calibrate_single_qubit_depolarizing(
            device,
            &model,
            crate::rb::MEASURED_SINGLE_QUBIT_ERROR,
        )?;
        model.depolarizing = Some(DepolarizingParams::new(single, Vec::new())?);
        model.with_calibrated_ecr(device, &crate::rb::MEASURED_CLIFFORD_ERRORS)
    }

    /// Replace the ECR depolarizing strengths by values calibrated to `targets`
    /// (errors per two-qubit Clifford, in native-pair order).
    pub fn with_calibrated_ecr(mut self, device: &Device, targets: &[f64]) -> Result<Self> {
        let cal = crate::rb::calibrate_ecr_depolarizing(device, &self, targets)?;
        let single = self.depolarizing.as_ref().map_or(0.0, |d| d.single_qubit);
        self.depolarizing = Some(DepolarizingParams::new(
            single,
            cal.iter().map(|c| (c.pair, c.lambda)).collect(),
        )?);
        Ok(self)
    }

    pub fn is_noiseless(&self) -> bool {
        self.coherence.is_none()
            && self.depolarizing.is_none()
            && self.readout.channels.iter().all(|c| c.sigma == 0.0)
    }

    /// The model seen by the sub-device on `qubits`, relabelled `0..len`.
    pub fn restricted(&self, qubits: &[usize]) -> Result<Self> {
        crate::kernel::linalg::check_targets(qubits, self.readout.n_channels())?;
        let local = |q: usize| qubits.iter().position(|&k| k == q);
        let coherence = self.coherence.as_ref().map(|c| QubitNoiseParams {
            t1_us: qubits.iter().map(|&q| c.t1_us[q]).collect(),
            t2_echo_us: qubits.iter().map(|&q| c.t2_echo_us[q]).collect(),
        });
        let depolarizing = self.depolarizing.as_ref().map(|d| DepolarizingParams {
            single_qubit: d.single_qubit,
            ecr: d
                .ecr
                .iter()
                .filter_map(|&((c, t), l)| Some(((local(c)?, local(t)?), l)))
                .collect(),
        });
        Ok(Self {
            coherence,
            depolarizing,
            readout: ReadoutModel {
                channels: qubits
                    .iter()
                    .map(|&q| self.readout.channels[q].clone())
                    .collect(),
            },
        })
    }
}

/// Evolve `dm` through `circuit`, layer by layer.
///
/// Each layer applies its unitaries, then decoherence on every qubit for the
/// layer span (idle qubits included), then depolarizing on the qubits of each
/// pulsed gate. Zero-angle rotations are idle slots and receive no
/// depolarizing. Measurements are not applied here.
pub fn apply_noisy_circuit(
    circuit: &Circuit,
    noise: &NoiseModel,
    dm: &DensityMatrix,
) -> Result<DensityMatrix> {
    let n = circuit.n_qubits();
    if dm.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: crate::kernel::linalg::dim_of(n),
            got: dm.dim(),
        });
    }
    if let Some(c) = &noise.coherence {
        if c.n_qubits() < n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.n_qubits(),
            });
        }
    }
    let mut state = dm.clone();
    for layer in circuit.layers() {
        for op in layer.ops {
            if let Some(local) = op.local_unitary() {
                if !op.is_identity() {
                    state = state.apply_unitary(&UnitaryMatrix::new(local)?, &op.qubits)?;
                }
            }
        }
        if let Some(c) = &noise.coherence {
            if layer.duration_ns > 0.0 {
                for q in 0..n {
                    state = apply_channel(&state, &c.channel(q, layer.duration_ns)?, &[q])?;
                }
            }
        }
        if let Some(d) = &noise.depolarizing {
            for op in layer.ops {
                let lambda = match op.kind {
                    GateKind::Rotation { .. } if op.is_identity() => continue,
                    GateKind::Rotation { .. } | GateKind::Hadamard => d.single_qubit,
                    GateKind::Ecr => d.ecr_lambda(op.qubits[0], op.qubits[1])?,
                    GateKind::Measure { .. } | GateKind::Barrier => continue,
                };
                if lambda > 0.0 {
                    let ch = KrausChannel::depolarizing(op.qubits.len(), lambda)?;
                    state = apply_channel(&state, &ch, &op.qubits)?;
                }
            }
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{detection_circuit, Device, ErrorSpec};
    use crate::kernel::linalg::max_abs;

    #[test]
    fn noiseless_equals_ideal() {
        let dev = Device::default();
        let c = detection_circuit(&dev, &"X60Y120".parse().unwrap(), None).unwrap();
        let start = DensityMatrix::zero(4).unwrap();
        let ideal = c.run_density(&start).unwrap();
        let noisy = apply_noisy_circuit(&c, &NoiseModel::off(4), &start).unwrap();
        assert!(max_abs(&(ideal.matrix() - noisy.matrix())) < 1e-10);
    }

    #[test]
    fn noisy_output_is_a_state() {
        let dev = Device::default();
        let mut noise = NoiseModel::measured_coherence();
        noise.depolarizing = Some(
            DepolarizingParams::new(
                0.002,
                dev.topology.ecr_pairs.iter().map(|&p| (p, 0.03)).collect(),
            )
            .unwrap(),
        );
        let c = detection_circuit(&dev, &ErrorSpec::y(1.0), None).unwrap();
        let out = apply_noisy_circuit(&c, &noise, &DensityMatrix::zero(4).unwrap()).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-9);
        assert!(out.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn lambda_conversion_round_trips() {
        let l = lambda_from_infidelity(2, 0.0604);
        assert!((l - 0.0604 * 4.0 / 3.0).abs() < 1e-15);
        assert!((infidelity_from_lambda(2, l) - 0.0604).abs() < 1e-15);
    }

    #[test]
    fn restriction_relabels_pairs() {
        let mut noise = NoiseModel::measured_coherence();
        noise.depolarizing =
            Some(DepolarizingParams::new(0.0, vec![((3, 0), 0.1), ((0, 1), 0.2)]).unwrap());
        let sub = noise.restricted(&[3, 0]).unwrap();
        assert_eq!(sub.depolarizing.unwrap().ecr, vec![((0, 1), 0.1)]);
        assert_eq!(sub.coherence.unwrap().t1_us, vec![29.0, 33.0]);
    }
}
