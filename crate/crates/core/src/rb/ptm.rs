//! Two-qubit Pauli transfer matrices for fast noisy Clifford fidelities.
//!
//! Indices run over `P_a (x) P_b` as `4a + b` with qubit 0 first, so product
//! channels have Kronecker-product transfer matrices. The layer semantics
//! mirror `apply_noisy_circuit`.

use std::sync::OnceLock;

use nalgebra::{Matrix4, SMatrix};

use crate::circuits::{ecr_matrix, Circuit, GateKind};
use crate::kernel::linalg::{self, CMatrix};
use crate::kernel::{Pauli, PauliString};
use crate::noise::NoiseModel;
use crate::{Error, Result};

use super::clifford::Tableau;

pub(crate) type Ptm2 = SMatrix<f64, 16, 16>;

fn ptm(ops: &[CMatrix], paulis: &[CMatrix]) -> Vec<f64> {
    let d = paulis[0].nrows() as f64;
    let m = paulis.len();
    let mut out = vec![0.0; m * m];
    for (j, pj) in paulis.iter().enumerate() {
        let image: CMatrix = ops
            .iter()
            .map(|k| k * pj * k.adjoint())
            .fold(CMatrix::zeros(pj.nrows(), pj.nrows()), |a, b| a + b);
        for (i, pi) in paulis.iter().enumerate() {
            out[i * m + j] = (pi * &image).trace().re / d;
        }
    }
    out
}

fn single_paulis() -> Vec<CMatrix> {
    Pauli::ALL.iter().map(|p| p.matrix()).collect()
}

/// Transfer matrix of a single-qubit channel given by Kraus operators.
pub(crate) fn ptm_1q(ops: &[CMatrix]) -> Matrix4<f64> {
    Matrix4::from_row_slice(&ptm(ops, &single_paulis()))
}

fn ecr_ptm() -> &'static Ptm2 {
    static ECR: OnceLock<Ptm2> = OnceLock::new();
    ECR.get_or_init(|| {
        let p1 = single_paulis();
        let paulis: Vec<CMatrix> = p1
            .iter()
            .flat_map(|a| p1.iter().map(move |b| linalg::kron(a, b)))
            .collect();
        Ptm2::from_row_slice(&ptm(&[ecr_matrix()], &paulis))
    })
}

fn depolarizing_1q(lambda: f64) -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(
        1.0,
        1.0 - lambda,
        1.0 - lambda,
        1.0 - lambda,
    ))
}

fn kron4(a: &Matrix4<f64>, b: &Matrix4<f64>) -> Ptm2 {
    let mut out = Ptm2::zeros();
    for i in 0..16 {
        for j in 0..16 {
            out[(i, j)] = a[(i / 4, j / 4)] * b[(i % 4, j % 4)];
        }
    }
    out
}

/// Transfer matrix of a noisy two-qubit circuit under `noise`.
pub(crate) fn circuit_ptm(circuit: &Circuit, noise: &NoiseModel) -> Result<Ptm2> {
    if circuit.n_qubits() != 2 {
        return Err(Error::InvalidArgument(
            "transfer matrices are two-qubit only".into(),
        ));
    }
    let single_lambda = noise.depolarizing.as_ref().map_or(0.0, |d| d.single_qubit);
    let mut total = Ptm2::identity();
    for layer in circuit.layers() {
        let mut local = [Matrix4::identity(), Matrix4::identity()];
        let mut pulsed = [false; 2];
        let mut ecr_lambda = None;
        for op in layer.ops {
            match op.kind {
                GateKind::Ecr => {
                    if op.qubits != [0, 1] {
                        return Err(Error::InvalidArgument("ECR must act on (0, 1)".into()));
                    }
                    ecr_lambda = Some(match &noise.depolarizing {
                        Some(d) => d.ecr_lambda(0, 1)?,
                        None => 0.0,
                    });
                }
                GateKind::Rotation { .. } | GateKind::Hadamard if !op.is_identity() => {
                    let q = op.qubits[0];
                    local[q] = ptm_1q(&[op.local_unitary().expect("single-qubit gate")]);
                    pulsed[q] = true;
                }
                _ => {}
            }
        }
        if let Some(c) = &noise.coherence {
            if layer.duration_ns > 0.0 {
                for (q, m) in local.iter_mut().enumerate() {
                    *m = ptm_1q(c.channel(q, layer.duration_ns)?.operators()) * *m;
                }
            }
        }
        for q in 0..2 {
            if pulsed[q] && single_lambda > 0.0 {
                local[q] = depolarizing_1q(single_lambda) * local[q];
            }
        }
        let step = match ecr_lambda {
            Some(lambda) => {
                let mut depol = Ptm2::from_diagonal_element(1.0 - lambda);
                depol[(0, 0)] = 1.0;
                depol * kron4(&local[0], &local[1]) * ecr_ptm()
            }
            None => kron4(&local[0], &local[1]),
        };
        total = step * total;
    }
    Ok(total)
}

/// Signed-permutation transfer matrix of a two-qubit Clifford.
pub(crate) fn tableau_ptm(tableau: &Tableau) -> Result<Ptm2> {
    let mut out = Ptm2::zeros();
    for j in 0..16 {
        let p = PauliString::new(vec![Pauli::ALL[j / 4], Pauli::ALL[j % 4]], 0);
        let image = tableau.conjugate(&p)?;
        let l = image.letters();
        let i = 4 * Pauli::ALL.iter().position(|&x| x == l[0]).unwrap()
            + Pauli::ALL.iter().position(|&x| x == l[1]).unwrap();
        out[(i, j)] = if image.phase() == 0 { 1.0 } else { -1.0 };
    }
    Ok(out)
}

/// Entanglement fidelity between two transfer matrices, the first unitary.
pub(crate) fn ptm_fidelity(ideal: &Ptm2, actual: &Ptm2) -> f64 {
    ideal.component_mul(actual).sum() / 16.0
}
