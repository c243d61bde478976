use std::f64::consts::TAU;

use rand::Rng;

use super::clifford::{clifford_group, sample_clifford, CliffordElement};
use crate::circuits::{Circuit, Device, GateKind, GateOp};
use crate::kernel::linalg::{self, CMatrix};
use crate::kernel::CliffordGate;
use crate::{Error, Result};

/// Native layers for one Clifford on `device` (one or two qubits).
///
/// Single-qubit generators and CNOT dressing are merged into at most one
/// pulse per qubit between ECRs. A single-qubit Clifford always occupies one
/// pulse slot; the identity is played as a `2 pi` rotation.
pub fn clifford_layers(device: &Device, element: &CliffordElement) -> Result<Vec<Vec<GateOp>>> {
    let n = element.n_qubits();
    if device.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: device.n_qubits(),
            got: n,
        });
    }
    let one_q = device.durations.single_qubit_ns;
    let mut pending: Vec<CMatrix> = vec![linalg::identity(2); n];
    let mut layers: Vec<Vec<GateOp>> = Vec::new();
    let flush =
        |pending: &mut Vec<CMatrix>, layers: &mut Vec<Vec<GateOp>>, force: bool| -> Result<()> {
            let mut layer = Vec::new();
            for (q, u) in pending.iter_mut().enumerate() {
                let (axis, angle) = linalg::axis_angle(u);
                if angle > 1e-12 {
                    layer.push(GateOp::rotation(q, axis, angle, one_q)?);
                } else if force {
                    layer.push(GateOp::x(q, TAU, one_q));
                }
                *u = linalg::identity(2);
            }
            if !layer.is_empty() {
                layers.push(layer);
            }
            Ok(())
        };
    for gate in &element.word {
        match *gate {
            CliffordGate::H(q) => pending[q] = linalg::hadamard() * &pending[q],
            CliffordGate::S(q) => pending[q] = linalg::phase_s() * &pending[q],
            CliffordGate::Cnot { control, target } => {
                for layer in device.cnot_layers(control, target)? {
                    if layer.iter().any(|op| op.kind == GateKind::Ecr) {
                        flush(&mut pending, &mut layers, false)?;
                        layers.push(layer);
                    } else {
                        for op in layer {
                            let u = op.local_unitary().expect("dressing is unitary");
                            pending[op.qubits[0]] = u * &pending[op.qubits[0]];
                        }
                    }
                }
            }
        }
    }
    flush(&mut pending, &mut layers, n == 1)?;
    Ok(layers)
}

/// A random Clifford sequence and its recovery element, as group indices.
#[derive(Debug, Clone, PartialEq)]
pub struct RbSequence {
    pub n_qubits: usize,
    /// `m` random elements followed by the inverse of their product.
    pub elements: Vec<usize>,
}

impl RbSequence {
    pub fn sample<R: Rng + ?Sized>(n_qubits: usize, length: usize, rng: &mut R) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidArgument(
                "RB sequence length must be at least 1".into(),
            ));
        }
        let group = clifford_group(n_qubits)?;
        let mut elements = Vec::with_capacity(length + 1);
        let mut total = group.identity_index();
        for _ in 0..length {
            let e = sample_clifford(n_qubits, rng)?;
            total = group.compose(total, e)?;
            elements.push(e);
        }
        elements.push(group.inverse(total)?);
        Ok(Self { n_qubits, elements })
    }

    pub fn length(&self) -> usize {
        self.elements.len() - 1
    }

    /// Native circuit on `device`; Cliffords are not merged across boundaries.
    pub fn circuit(&self, device: &Device) -> Result<Circuit> {
        let group = clifford_group(self.n_qubits)?;
        let mut c = Circuit::new(format!("rb_m{}", self.length()), device.n_qubits());
        for &e in &self.elements {
            for layer in clifford_layers(device, group.element(e))? {
                c.push_layer(layer)?;
            }
        }
        Ok(c)
    }
}

/// `m` random Cliffords plus the recovery element, compiled for `device`.
pub fn build_rb_sequence<R: Rng + ?Sized>(
    device: &Device,
    length: usize,
    rng: &mut R,
) -> Result<Circuit> {
    RbSequence::sample(device.n_qubits(), length, rng)?.circuit(device)
}

/// Mean number of ECRs per compiled two-qubit Clifford.
pub fn mean_ecr_count(device: &Device) -> Result<f64> {
    let group = clifford_group(2)?;
    let mut total = 0usize;
    for e in group.elements() {
        total += clifford_layers(device, e)?
            .iter()
            .flatten()
            .filter(|op| op.kind == GateKind::Ecr)
            .count();
    }
    Ok(total as f64 / group.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{DensityMatrix, StateVector};
    use crate::rng::stream;

    fn pair() -> Device {
        Device::default().restricted(&[0, 1]).unwrap()
    }

    #[test]
    fn compiled_cliffords_match_their_unitaries() {
        let dev = pair();
        let group = clifford_group(2).unwrap();
        let mut rng = stream(21, &[]);
        for _ in 0..100 {
            let e = group.element(sample_clifford(2, &mut rng).unwrap());
            let mut c = Circuit::new("c", 2);
            for layer in clifford_layers(&dev, e).unwrap() {
                c.push_layer(layer).unwrap();
            }
            let u = c.unitary().unwrap();
            assert!(linalg::phase_aligned_distance(u.matrix(), &e.unitary) < 1e-9);
        }
    }

    #[test]
    fn noiseless_sequences_return_to_ground() {
        let dev2 = pair();
        let dev1 = Device::default().restricted(&[2]).unwrap();
        let mut rng = stream(8, &[]);
        for i in 0..200 {
            let m = 1 + i % 20;
            for dev in [&dev1, &dev2] {
                let c = build_rb_sequence(dev, m, &mut rng).unwrap();
                let n = dev.n_qubits();
                let out = c.run_pure(&StateVector::zero(n).unwrap()).unwrap();
                assert!(out.amplitudes()[0].norm_sqr() > 1.0 - 1e-9);
            }
        }
        let c = build_rb_sequence(&dev2, 3, &mut rng).unwrap();
        let out = c.run_density(&DensityMatrix::zero(2).unwrap()).unwrap();
        assert!((out.probabilities()[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_sequence() {
        let group = clifford_group(2).unwrap();
        let id = group.identity_index();
        let seq = RbSequence {
            n_qubits: 2,
            elements: vec![id, group.inverse(id).unwrap()],
        };
        assert_eq!(seq.elements, vec![id, id]);
        assert_eq!(seq.circuit(&pair()).unwrap().ops().len(), 0);
    }

    #[test]
    fn single_qubit_cliffords_are_one_pulse() {
        let dev = Device::default().restricted(&[0]).unwrap();
        for e in clifford_group(1).unwrap().elements() {
            let layers = clifford_layers(&dev, e).unwrap();
            assert_eq!(layers.len(), 1);
            assert_eq!(layers[0].len(), 1);
        }
    }

    #[test]
    fn one_and_a_half_ecrs_per_clifford() {
        assert!((mean_ecr_count(&pair()).unwrap() - 1.5).abs() < 1e-12);
    }
}
