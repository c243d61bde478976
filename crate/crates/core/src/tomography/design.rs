//! Pauli-basis conventions and the 108 x 16 design matrix.
//!
//! A code-pair state is `rho = sum_j x_j P_j` over `P_j = P_a (x) P_b`,
//! `j = 4a + b`, `P` in `I, X, Y, Z`, with unnormalized Paulis. Trace one
//! fixes `x_0 = 1/4` and `x_j = Tr(rho P_j) / 4`.

use nalgebra::DMatrix;

use super::settings::{MeasSetting, N_SETTINGS};
use crate::kernel::linalg::{self, CMatrix};
use crate::kernel::Pauli;
use crate::{Error, Result};

pub const N_PAULIS: usize = 16;
pub const N_ROWS: usize = 3 * N_SETTINGS;

pub fn pauli_basis() -> Vec<CMatrix> {
    Pauli::ALL
        .iter()
        .flat_map(|a| {
            Pauli::ALL
                .iter()
                .map(move |b| linalg::kron(&a.matrix(), &b.matrix()))
        })
        .collect()
}

/// Two-letter label of `P_j`, e.g. `"XY"`.
pub fn pauli_label(j: usize) -> String {
    const L: [char; 4] = ['I', 'X', 'Y', 'Z'];
    format!("{}{}", L[j / 4], L[j % 4])
}

pub fn pauli_to_density(x: &[f64; N_PAULIS]) -> CMatrix {
    pauli_basis()
        .iter()
        .zip(x)
        .fold(CMatrix::zeros(4, 4), |acc, (p, &xj)| {
            acc + p * linalg::c(xj, 0.0)
        })
}

pub fn density_to_pauli(rho: &CMatrix) -> [f64; N_PAULIS] {
    let basis = pauli_basis();
    std::array::from_fn(|j| (rho * &basis[j]).trace().re / 4.0)
}

/// Number of singular values above `tol` times the largest.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// `M[(3u + k, j)] = Tr(U_u^dag O_k U_u P_j)`, so that `m = M x`.
///
/// `x_0` is fixed, so the requirement is full rank on the 15 traceless
/// columns. Traceless observables leave the `II` column zero.
pub fn design_matrix(observables: &[CMatrix; 3]) -> Result<DMatrix<f64>> {
    for o in observables {
        if o.shape() != (4, 4) || linalg::max_abs(&(o - o.adjoint())) > 1e-10 {
            return Err(Error::InvalidArgument(
                "observables must be 4x4 Hermitian".into(),
            ));
        }
    }
    let basis = pauli_basis();
    let mut m = DMatrix::zeros(N_ROWS, N_PAULIS);
    for s in MeasSetting::all() {
        let u = s.unitary();
        for (k, o) in observables.iter().enumerate() {
            let rotated = u.adjoint() * o * &u;
            for (j, p) in basis.iter().enumerate() {
                m[(3 * s.index() + k, j)] = (&rotated * p).trace().re;
            }
        }
    }
    let rank = numerical_rank(&m.columns(1, N_PAULIS - 1).into_owned(), 1e-10);
    if rank < N_PAULIS - 1 {
        return Err(Error::Numerical(format!(
            "design matrix has rank {rank} < 15 on the traceless Paulis"
        )));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::ObservableCalibration;

    #[test]
    fn identity_setting_row_picks_out_zi() {
        let m = design_matrix(&ObservableCalibration::ideal().observables).unwrap();
        for j in 0..16 {
            let expected = if pauli_label(j) == "ZI" { 4.0 } else { 0.0 };
            assert!((m[(0, j)] - expected).abs() < 1e-12, "{}", pauli_label(j));
        }
    }

    #[test]
    fn ideal_design_has_full_traceless_rank() {
        let m = design_matrix(&ObservableCalibration::ideal().observables).unwrap();
        assert_eq!(numerical_rank(&m.columns(1, 15).into_owned(), 1e-10), 15);
        assert!(m.column(0).iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn offset_observables_reach_rank_16() {
        let mut obs = ObservableCalibration::ideal().observables;
        obs[0] += linalg::identity(4) * linalg::c(0.02, 0.0);
        let m = design_matrix(&obs).unwrap();
        assert_eq!(numerical_rank(&m, 1e-10), 16);
    }

    #[test]
    fn scaled_observables_keep_full_rank() {
        let ideal = ObservableCalibration::ideal().observables;
        for (a, b) in [(0.9, 0.95), (1.0, 0.92), (0.93, 1.0)] {
            let mut obs = ideal.clone();
            obs[0] *= linalg::c(a, 0.0);
            obs[1] *= linalg::c(b, 0.0);
            obs[2] *= linalg::c(a * b, 0.0);
            obs[2] += linalg::identity(4) * linalg::c(0.05, 0.0);
            assert!(design_matrix(&obs).is_ok());
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let z = linalg::kron(&linalg::pauli_z(), &linalg::identity(2));
        assert!(design_matrix(&[z.clone(), z.clone(), z]).is_err());
    }

    #[test]
    fn pauli_round_trip() {
        let mut x = [0.0; 16];
        x[0] = 0.25;
        x[5] = 0.1;
        x[15] = -0.2;
        let back = density_to_pauli(&pauli_to_density(&x));
        for j in 0..16 {
            assert!((back[j] - x[j]).abs() < 1e-15);
        }
    }
}
