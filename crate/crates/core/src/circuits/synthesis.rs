use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use super::circuit::Circuit;
use super::gate::{DeviceTopology, GateDurations, GateOp};
use crate::{Error, Result};

/// Physical layout and timing.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Device {
    pub topology: DeviceTopology,
    pub durations: GateDurations,
}

impl Device {
    pub fn n_qubits(&self) -> usize {
        self.topology.n_qubits()
    }

    /// The sub-device on `qubits`, relabelled `0..qubits.len()` in the given
    /// order. Only pairs with both ends kept survive.
    pub fn restricted(&self, qubits: &[usize]) -> Result<Device> {
        crate::kernel::linalg::check_targets(qubits, self.n_qubits())?;
        let local = |q: usize| qubits.iter().position(|&k| k == q);
        let mut ecr_pairs = Vec::new();
        let mut ecr_tau_ns = Vec::new();
        for (&(c, t), &tau) in self
            .topology
            .ecr_pairs
            .iter()
            .zip(&self.durations.ecr_tau_ns)
        {
            if let (Some(c), Some(t)) = (local(c), local(t)) {
                ecr_pairs.push((c, t));
                ecr_tau_ns.push(tau);
            }
        }
        Ok(Device {
            topology: DeviceTopology {
                ecr_pairs,
                roles: qubits.iter().map(|&q| self.topology.roles[q]).collect(),
            },
            durations: GateDurations {
                single_qubit_ns: self.durations.single_qubit_ns,
                ecr_tau_ns,
            },
        })
    }

    /// Layers realizing CNOT(control -> target) from one ECR.
    ///
    /// On a native pair: ECR, then a pi rotation about `(x+y)/sqrt2` on the
    /// control and `X_90` on the target. Against the native direction the
    /// same block is wrapped in Hadamards on both qubits.
    pub fn cnot_layers(&self, control: usize, target: usize) -> Result<Vec<Vec<GateOp>>> {
        let d = &self.durations;
        let one_q = d.single_qubit_ns;
        let native = |c: usize, t: usize| -> Result<Vec<Vec<GateOp>>> {
            Ok(vec![
                vec![GateOp::ecr(&self.topology, c, t, d)?],
                vec![
                    GateOp::rotation(c, [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0], PI, one_q)?,
                    GateOp::x(t, FRAC_PI_2, one_q),
                ],
            ])
        };
        if self.topology.pair_index(control, target).is_some() {
            native(control, target)
        } else if self.topology.pair_index(target, control).is_some() {
            let hh = || {
                vec![
                    GateOp::hadamard(control, one_q),
                    GateOp::hadamard(target, one_q),
                ]
            };
            let mut layers = vec![hh()];
            layers.extend(native(target, control)?);
            layers.push(hh());
            Ok(layers)
        } else {
            Err(Error::Disconnected(control, target))
        }
    }
}

/// Native-gate circuit equal to CNOT(control -> target) up to global phase.
pub fn cnot_from_ecr(device: &Device, control: usize, target: usize) -> Result<Circuit> {
    let mut c = Circuit::new(format!("cnot_{control}_{target}"), device.n_qubits());
    for layer in device.cnot_layers(control, target)? {
        c.push_layer(layer)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg::{self, embed, phase_aligned_distance};
    use crate::kernel::{QuantumState, StateVector, UnitaryMatrix};

    fn canonical(control: usize, target: usize) -> linalg::CMatrix {
        embed(&linalg::cnot(), &[control, target], 4).unwrap()
    }

    #[test]
    fn every_needed_direction_matches_cnot() {
        let dev = Device::default();
        for (c, t) in [
            (0, 1),
            (1, 0),
            (1, 2),
            (2, 1),
            (2, 3),
            (3, 2),
            (3, 0),
            (0, 3),
        ] {
            let u = cnot_from_ecr(&dev, c, t).unwrap().unitary().unwrap();
            let dist = phase_aligned_distance(u.matrix(), &canonical(c, t));
            assert!(dist < 1e-10, "CNOT({c}->{t}) distance {dist}");
        }
    }

    #[test]
    fn restriction_keeps_pair_timing() {
        let dev = Device::default().restricted(&[3, 0]).unwrap();
        assert_eq!(dev.n_qubits(), 2);
        assert_eq!(dev.topology.ecr_pairs, vec![(0, 1)]);
        assert!((dev.durations.ecr_ns(0) - 433.3).abs() < 1e-9);
        let u = cnot_from_ecr(&dev, 1, 0).unwrap().unitary().unwrap();
        assert!(
            phase_aligned_distance(u.matrix(), &embed(&linalg::cnot(), &[1, 0], 2).unwrap())
                < 1e-10
        );
        assert!(Device::default().restricted(&[0, 0]).is_err());
    }

    #[test]
    fn disconnected_pair_rejected() {
        let dev = Device::default();
        assert_eq!(
            cnot_from_ecr(&dev, 0, 2).unwrap_err(),
            Error::Disconnected(0, 2)
        );
        assert_eq!(
            cnot_from_ecr(&dev, 1, 3).unwrap_err(),
            Error::Disconnected(1, 3)
        );
    }

    #[test]
    fn truth_table_on_10() {
        let dev = Device::default();
        let u = cnot_from_ecr(&dev, 0, 1).unwrap().unitary().unwrap();
        // |1000> -> |1100> (Q1 is the most significant bit).
        let s = StateVector::basis(4, 0b1000).unwrap();
        let out = s.apply_unitary(&u, &[0, 1, 2, 3]).unwrap();
        assert!((out.amplitudes()[0b1100].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_identical_cnots_cancel() {
        let dev = Device::default();
        let mut c = cnot_from_ecr(&dev, 1, 2).unwrap();
        c.extend(&cnot_from_ecr(&dev, 1, 2).unwrap()).unwrap();
        let u = c.unitary().unwrap();
        let id = UnitaryMatrix::new(linalg::identity(16)).unwrap();
        assert!(phase_aligned_distance(u.matrix(), id.matrix()) < 1e-9);
    }
}
