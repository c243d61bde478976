use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::design::{density_to_pauli, pauli_to_density, N_PAULIS, N_ROWS};
use crate::kernel::linalg::{self, CMatrix};
use crate::kernel::DensityMatrix;
use crate::{Error, Result};

const X0: f64 = 0.25;

/// Eigenvalues above `-PHYSICAL_TOL` count as non-negative.
const PHYSICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearEstimate {
    pub pauli_vector: [f64; N_PAULIS],
    /// `|m - M x|`.
    pub residual: f64,
}

impl LinearEstimate {
    pub fn density(&self) -> CMatrix {
        pauli_to_density(&self.pauli_vector)
    }

    /// Sum of the negative eigenvalues of the estimate (0 when physical).
    pub fn physicality(&self) -> f64 {
        let (values, _) = linalg::hermitian_eigen(&self.density());
        // Adding 0.0 turns an empty sum of -0.0 into 0.0.
        values.iter().filter(|&&v| v < -PHYSICAL_TOL).sum::<f64>() + 0.0
    }
}

fn check_shapes(m: &[f64], design: &DMatrix<f64>) -> Result<()> {
    if design.shape() != (N_ROWS, N_PAULIS) {
        return Err(Error::DimensionMismatch {
            expected: N_ROWS * N_PAULIS,
            got: design.len(),
        });
    }
    if m.len() != N_ROWS {
        return Err(Error::DimensionMismatch {
            expected: N_ROWS,
            got: m.len(),
        });
    }
    Ok(())
}

/// Least-squares Pauli vector with `x_0` held at 1/4.
pub fn linear_inversion(m: &[f64], design: &DMatrix<f64>) -> Result<LinearEstimate> {
    check_shapes(m, design)?;
    let rest = design.columns(1, N_PAULIS - 1).into_owned();
    let rhs = DVector::from_column_slice(m) - design.column(0) * X0;
    let svd = rest.svd(true, true);
    let max = svd.singular_values.max();
    if !(max > 0.0) || svd.singular_values.iter().any(|&s| s <= 1e-10 * max) {
        return Err(Error::Numerical("design matrix is rank deficient".into()));
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let mut x = [0.0; N_PAULIS];
    x[0] = X0;
    x[1..].copy_from_slice(sol.as_slice());
    let residual = (DVector::from_column_slice(m) - design * DVector::from_column_slice(&x)).norm();
    Ok(LinearEstimate {
        pauli_vector: x,
        residual,
    })
}

/// Frobenius-nearest unit-trace positive semidefinite matrix.
///
/// The smallest eigenvalues are zeroed while their accumulated negative
/// weight, spread evenly over the rest, would push the next one below zero;
/// the remaining eigenvalues absorb that weight.
pub fn closest_physical(rho: &CMatrix) -> Result<DensityMatrix> {
    let d = rho.nrows();
    if rho.ncols() != d || linalg::max_abs(&(rho - rho.adjoint())) > 1e-9 {
        return Err(Error::InvalidArgument(
            "input must be square and Hermitian".into(),
        ));
    }
    if !d.is_power_of_two() || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} is not a qubit register"
        )));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "input trace {trace} is not 1"
        )));
    }
    let (mut values, vectors) = linalg::hermitian_eigen(rho);
    let mut carried = 0.0;
    let mut keep = d;
    while keep > 0 {
        let v = values[keep - 1];
        if v + carried / keep as f64 >= 0.0 {
            break;
        }
        carried += v;
        values[keep - 1] = 0.0;
        keep -= 1;
    }
    for v in values.iter_mut().take(keep) {
        *v += carried / keep as f64;
    }
    let n = d.trailing_zeros() as usize;
    DensityMatrix::new_unchecked(n, linalg::from_eigen(&values, &vectors))
}

fn project(x: &[f64; N_PAULIS]) -> Result<[f64; N_PAULIS]> {
    let mut rho = pauli_to_density(x);
    rho = (&rho + rho.adjoint()) * linalg::c(0.5, 0.0);
    let mut out = density_to_pauli(closest_physical(&rho)?.matrix());
    out[0] = X0;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleEstimate {
    pub pauli_vector: [f64; N_PAULIS],
    /// `|V^{-1/2}(m - M x)|^2` at the returned point.
    pub objective: f64,
    /// Objective of the projected linear-inversion estimate (the start).
    pub start_objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl MleEstimate {
    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(2, pauli_to_density(&self.pauli_vector))
    }
}

/// Weighted least squares over physical states.
///
/// Accelerated projected gradient with step `1/L`, started from the
/// projected linear inversion estimate. A momentum step that does not lower
/// the objective is replaced by a plain projected step, so the objective
/// never rises. The run stops when a plain step lowers it by less than the
/// tolerance. Hitting the iteration cap returns the last iterate with
/// `converged = false`.
pub fn mle_reconstruct(
    m: &[f64],
    variances: &[f64],
    design: &DMatrix<f64>,
    opts: &MleOptions,
) -> Result<MleEstimate> {
    check_shapes(m, design)?;
    if variances.len() != N_ROWS || variances.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "variances must be 108 positive values".into(),
        ));
    }
    let weights = DVector::from_iterator(N_ROWS, variances.iter().map(|v| 1.0 / v));
    let mv = DVector::from_column_slice(m);
    let weighted = DMatrix::from_fn(N_ROWS, N_PAULIS, |i, j| design[(i, j)] * weights[i]);
    let hessian = design.transpose() * &weighted;
    let lipschitz = 2.0 * hessian.symmetric_eigenvalues().max();
    let objective = |x: &[f64; N_PAULIS]| {
        let r = &mv - design * DVector::from_column_slice(x);
        r.iter()
            .zip(weights.iter())
            .map(|(r, w)| r * r * w)
            .sum::<f64>()
    };
    let step_from = |y: &[f64; N_PAULIS]| -> Result<[f64; N_PAULIS]> {
        let r = &mv - design * DVector::from_column_slice(y);
        let grad = weighted.transpose() * r * -2.0;
        let mut out = *y;
        for j in 1..N_PAULIS {
            out[j] -= grad[j] / lipschitz;
        }
        project(&out)
    };
    let li = linear_inversion(m, design)?;
    let mut x = project(&li.pauli_vector)?;
    let start_objective = objective(&x);
    let mut f = start_objective;
    let mut prev = x;
    let mut t = 1.0_f64;
    for it in 1..=opts.max_iterations {
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        let accelerated = beta > 0.0;
        let y: [f64; N_PAULIS] = std::array::from_fn(|j| x[j] + beta * (x[j] - prev[j]));
        let mut z = step_from(&y)?;
        let mut fz = objective(&z);
        let mut plain = !accelerated;
        if fz > f && accelerated {
            t = 1.0;
            z = step_from(&x)?;
            fz = objective(&z);
            plain = true;
        } else {
            t = t_next;
        }
        if fz > f {
            // Only rounding is left.
            return Ok(MleEstimate {
                pauli_vector: x,
                objective: f,
                start_objective,
                iterations: it,
                converged: true,
            });
        }
        let change = f - fz;
        prev = x;
        x = z;
        f = fz;
        if change < opts.tolerance {
            if plain {
                return Ok(MleEstimate {
                    pauli_vector: x,
                    objective: f,
                    start_objective,
                    iterations: it,
                    converged: true,
                });
            }
            // Confirm with a plain step before stopping.
            t = 1.0;
            prev = x;
        }
    }
    Ok(MleEstimate {
        pauli_vector: x,
        objective: f,
        start_objective,
        iterations: opts.max_iterations,
        converged: false,
    })
}
