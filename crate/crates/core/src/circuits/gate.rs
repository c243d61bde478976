use serde::{Deserialize, Serialize};

use crate::kernel::linalg::{self, CMatrix};
use crate::{Error, Result};

const AXIS_TOL: f64 = 1e-9;

/// Role of a physical qubit in the sublattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitRole {
    Code,
    ZSyndrome,
    XSyndrome,
}

/// Qubit indices (zero-based: `Q1 = 0`).
pub const Q1: usize = 0;
pub const Q2: usize = 1;
pub const Q3: usize = 2;
pub const Q4: usize = 3;

/// Connectivity and roles of the 2x2 device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceTopology {
    /// Native ECR directions as `(control, target)`.
    pub ecr_pairs: Vec<(usize, usize)>,
    pub roles: Vec<QubitRole>,
}

impl Default for DeviceTopology {
    fn default() -> Self {
        Self {
            ecr_pairs: vec![(Q1, Q2), (Q2, Q3), (Q3, Q4), (Q4, Q1)],
            roles: vec![
                QubitRole::Code,
                QubitRole::ZSyndrome,
                QubitRole::Code,
                QubitRole::XSyndrome,
            ],
        }
    }
}

impl DeviceTopology {
    pub fn n_qubits(&self) -> usize {
        self.roles.len()
    }

    /// Index of `(control, target)` in the native pair list.
    pub fn pair_index(&self, control: usize, target: usize) -> Option<usize> {
        self.ecr_pairs.iter().position(|&p| p == (control, target))
    }

    pub fn check_pair(&self, control: usize, target: usize) -> Result<usize> {
        self.pair_index(control, target)
            .ok_or(Error::Disconnected(control, target))
    }

    pub fn code_qubits(&self) -> Vec<usize> {
        self.qubits_with(QubitRole::Code)
    }

    pub fn qubits_with(&self, role: QubitRole) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&q| self.roles[q] == role)
            .collect()
    }
}

/// Gate timing in nanoseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDurations {
    pub single_qubit_ns: f64,
    /// Cross-resonance pulse length `tau`, one per native pair, in topology order.
    pub ecr_tau_ns: Vec<f64>,
}

impl Default for GateDurations {
    fn default() -> Self {
        Self {
            single_qubit_ns: 53.3,
            ecr_tau_ns: vec![400.0, 360.0, 440.0, 190.0],
        }
    }
}

impl GateDurations {
    /// Two echoed pulses plus the control-qubit pi pulse.
    pub fn ecr_ns(&self, pair_index: usize) -> f64 {
        2.0 * self.ecr_tau_ns[pair_index] + self.single_qubit_ns
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            single_qubit_ns: self.single_qubit_ns * factor,
            ecr_tau_ns: self.ecr_tau_ns.iter().map(|t| t * factor).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    /// `exp(-i angle/2 axis.sigma)`.
    Rotation {
        axis: [f64; 3],
        angle: f64,
    },
    Hadamard,
    Ecr,
    Measure {
        channel: usize,
    },
    /// Ends a layer of parallel operations; the duration is the layer's span.
    Barrier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub duration_ns: f64,
}

impl GateOp {
    pub fn rotation(qubit: usize, axis: [f64; 3], angle: f64, duration_ns: f64) -> Result<Self> {
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > AXIS_TOL {
            return Err(Error::InvalidArgument(format!(
                "rotation axis {axis:?} has norm {norm}"
            )));
        }
        if !angle.is_finite() {
            return Err(Error::InvalidArgument(format!("rotation angle {angle}")));
        }
        Ok(Self {
            kind: GateKind::Rotation { axis, angle },
            qubits: vec![qubit],
            duration_ns,
        })
    }

    pub fn x(qubit: usize, angle: f64, duration_ns: f64) -> Self {
        Self::rotation(qubit, [1.0, 0.0, 0.0], angle, duration_ns).expect("unit axis")
    }

    pub fn y(qubit: usize, angle: f64, duration_ns: f64) -> Self {
        Self::rotation(qubit, [0.0, 1.0, 0.0], angle, duration_ns).expect("unit axis")
    }

    pub fn z(qubit: usize, angle: f64, duration_ns: f64) -> Self {
        Self::rotation(qubit, [0.0, 0.0, 1.0], angle, duration_ns).expect("unit axis")
    }

    pub fn hadamard(qubit: usize, duration_ns: f64) -> Self {
        Self {
            kind: GateKind::Hadamard,
            qubits: vec![qubit],
            duration_ns,
        }
    }

    /// ECR on a native pair of `topology`.
    pub fn ecr(
        topology: &DeviceTopology,
        control: usize,
        target: usize,
        durations: &GateDurations,
    ) -> Result<Self> {
        let idx = topology.check_pair(control, target)?;
        Ok(Self {
            kind: GateKind::Ecr,
            qubits: vec![control, target],
            duration_ns: durations.ecr_ns(idx),
        })
    }

    pub fn measure(qubit: usize, channel: usize) -> Self {
        Self {
            kind: GateKind::Measure { channel },
            qubits: vec![qubit],
            duration_ns: 0.0,
        }
    }

    pub fn barrier(qubits: Vec<usize>, duration_ns: f64) -> Self {
        Self {
            kind: GateKind::Barrier,
            qubits,
            duration_ns,
        }
    }

    pub fn is_unitary(&self) -> bool {
        matches!(
            self.kind,
            GateKind::Rotation { .. } | GateKind::Hadamard | GateKind::Ecr
        )
    }

    /// True for a zero-angle rotation: an idle slot with no pulse.
    pub fn is_identity(&self) -> bool {
        matches!(self.kind, GateKind::Rotation { angle, .. } if angle == 0.0)
    }

    /// Local unitary on `self.qubits`; `None` for measurements and barriers.
    pub fn local_unitary(&self) -> Option<CMatrix> {
        match &self.kind {
            GateKind::Rotation { axis, angle } => Some(linalg::rotation(*axis, *angle)),
            GateKind::Hadamard => Some(linalg::hadamard()),
            GateKind::Ecr => Some(ecr_matrix()),
            GateKind::Measure { .. } | GateKind::Barrier => None,
        }
    }
}

/// Fixed ECR convention: `ZX_90 * (X (x) I)`, control as the most significant qubit.
///
/// The control pi pulse is applied first, then `exp(-i pi/4 Z(x)X)`.
pub fn ecr_matrix() -> CMatrix {
    let zx = linalg::kron(&linalg::pauli_z(), &linalg::pauli_x());
    let zx90 = linalg::pauli_exponential(&zx, std::f64::consts::FRAC_PI_2);
    let x_control = linalg::kron(&linalg::pauli_x(), &linalg::identity(2));
    zx90 * x_control
}

/// ECR unitary for a native pair.
pub fn ecr_unitary(
    topology: &DeviceTopology,
    control: usize,
    target: usize,
) -> Result<crate::kernel::UnitaryMatrix> {
    topology.check_pair(control, target)?;
    crate::kernel::UnitaryMatrix::new(ecr_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg::{c, max_abs};

    #[test]
    fn rejects_non_unit_axis() {
        assert!(GateOp::rotation(0, [1.0, 1.0, 0.0], 0.3, 10.0).is_err());
        assert!(GateOp::rotation(0, [0.6, 0.8, 0.0], 0.3, 10.0).is_ok());
    }

    #[test]
    fn ecr_connectivity() {
        let t = DeviceTopology::default();
        assert!(ecr_unitary(&t, Q1, Q2).is_ok());
        assert!(ecr_unitary(&t, Q4, Q1).is_ok());
        assert_eq!(
            ecr_unitary(&t, Q2, Q1).unwrap_err(),
            Error::Disconnected(Q2, Q1)
        );
        assert_eq!(
            ecr_unitary(&t, Q1, Q3).unwrap_err(),
            Error::Disconnected(Q1, Q3)
        );
    }

    #[test]
    fn ecr_durations_follow_tau() {
        let d = GateDurations::default();
        assert!((d.ecr_ns(0) - 853.3).abs() < 1e-9);
        assert!((d.ecr_ns(3) - 433.3).abs() < 1e-9);
    }

    #[test]
    fn ecr_is_unitary_and_entangling() {
        let e = ecr_matrix();
        assert!(max_abs(&(e.adjoint() * &e - linalg::identity(4))) < 1e-12);
        // A product unitary maps |+0> to a product state (zero determinant of
        // the 2x2 amplitude matrix); ECR does not.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let col: Vec<_> = (0..4).map(|i| (e[(i, 0)] + e[(i, 2)]) * h).collect();
        let det = col[0] * col[3] - col[1] * col[2];
        assert!(det.norm() > 0.1);
    }

    #[test]
    fn echo_sequence_cancels_ix_term() {
        // CR(+) X_c CR(-) with an arbitrary spurious IX drive equals the ECR.
        let zx = linalg::kron(&linalg::pauli_z(), &linalg::pauli_x());
        let ix = linalg::kron(&linalg::identity(2), &linalg::pauli_x());
        let x_c = linalg::kron(&linalg::pauli_x(), &linalg::identity(2));
        for b in [0.0, 0.17, -0.6] {
            let h = &zx * c(std::f64::consts::PI / 8.0, 0.0) + &ix * c(b, 0.0);
            let cr_plus = (h.clone() * c(0.0, -1.0)).exp();
            let cr_minus = (h * c(0.0, 1.0)).exp();
            let echo = cr_plus * &x_c * cr_minus;
            assert!(linalg::phase_aligned_distance(&echo, &ecr_matrix()) < 1e-10);
        }
    }
}
