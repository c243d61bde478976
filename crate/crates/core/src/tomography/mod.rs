//! Syndrome-conditioned tomography of the code pair (Q1, Q3).

mod collect;
mod design;
mod estimate;
mod observables;
mod settings;

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use collect::{collect_conditioned, MeasurementVector, DEFAULT_MIN_BIN_SHOTS};
pub use design::{
    density_to_pauli, design_matrix, numerical_rank, pauli_basis, pauli_label, pauli_to_density,
    N_PAULIS, N_ROWS,
};
pub use estimate::{
    closest_physical, linear_inversion, mle_reconstruct, LinearEstimate, MleEstimate, MleOptions,
};
pub use observables::{
    calibrate_observables, calibration_shots, ObservableCalibration, ShotNormalization,
};
pub use settings::{MeasSetting, N_SETTINGS};

use crate::circuits::Syndrome;
use crate::kernel::linalg::{c, CMatrix};
use crate::kernel::StateVector;
use crate::noise::ReadoutModel;
use crate::protocol::ShotRecord;
use crate::rng::{stream, tag};
use crate::{Error, Result};

/// Ideal code-pair state for a syndrome: `00 -> (|00> + |11>)/sqrt2`,
/// `01 -> (|00> - |11>)/sqrt2`, `10 -> (|01> + |10>)/sqrt2`,
/// `11 -> (|01> - |10>)/sqrt2` (bits are M2 then M4).
pub fn target_state(syndrome: Syndrome) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let sign = if syndrome.x_flip { -h } else { h };
    let amps = if syndrome.z_flip {
        [0.0, h, sign, 0.0]
    } else {
        [h, 0.0, 0.0, sign]
    };
    StateVector::new(2, amps.iter().map(|&a| c(a, 0.0)).collect()).expect("normalized")
}

fn overlap(rho: &CMatrix, psi: &StateVector) -> f64 {
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    (v.adjoint() * rho * &v)[(0, 0)].re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomographyOptions {
    pub min_bin_shots: usize,
    pub mle: MleOptions,
    /// 0 disables the bootstrap.
    pub bootstrap_resamples: usize,
}

impl Default for TomographyOptions {
    fn default() -> Self {
        Self {
            min_bin_shots: DEFAULT_MIN_BIN_SHOTS,
            mle: MleOptions::default(),
            bootstrap_resamples: 0,
        }
    }
}

/// Reconstruction report for one syndrome bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconResult {
    pub bin: String,
    /// Physical estimate, `x_0 = 1/4`.
    pub pauli_vector: [f64; N_PAULIS],
    pub fidelity: f64,
    /// Bootstrap variance of `fidelity`, when requested.
    pub variance: Option<f64>,
    /// Fidelity of the raw linear-inversion estimate.
    pub linear_fidelity: f64,
    /// Sum of negative eigenvalues of the linear-inversion estimate.
    pub physicality: f64,
    pub shots_used: usize,
    pub mle_iterations: usize,
    pub mle_converged: bool,
}

impl ReconResult {
    pub fn density(&self) -> CMatrix {
        pauli_to_density(&self.pauli_vector)
    }

    /// Largest `|<P>|` over the six weight-one Paulis (`<P> = 4 x_j`).
    pub fn max_single_qubit_weight(&self) -> f64 {
        [1, 2, 3, 4, 8, 12]
            .iter()
            .map(|&j| 4.0 * self.pauli_vector[j].abs())
            .fold(0.0, f64::max)
    }
}

/// Linear inversion, physicality and MLE for one measurement vector.
pub fn reconstruct(
    mv: &MeasurementVector,
    design: &DMatrix<f64>,
    opts: &MleOptions,
) -> Result<ReconResult> {
    let target = target_state(mv.syndrome);
    let li = linear_inversion(&mv.values, design)?;
    let mle = mle_reconstruct(&mv.values, &mv.variances, design, opts)?;
    if mle.objective > mle.start_objective {
        return Err(Error::Numerical("MLE objective above its start".into()));
    }
    Ok(ReconResult {
        bin: mv.syndrome.bits().to_string(),
        pauli_vector: mle.pauli_vector,
        fidelity: overlap(&pauli_to_density(&mle.pauli_vector), &target),
        variance: None,
        linear_fidelity: overlap(&li.density(), &target),
        physicality: li.physicality(),
        shots_used: mv.shots(),
        mle_iterations: mle.iterations,
        mle_converged: mle.converged,
    })
}

fn by_setting(shots: &[ShotRecord]) -> Vec<Vec<ShotRecord>> {
    let mut out = vec![Vec::new(); N_SETTINGS];
    for s in shots {
        if s.setting < N_SETTINGS {
            out[s.setting].push(*s);
        }
    }
    out
}

const MAX_REDRAWS: usize = 100;

/// Sample variance of the reconstructed fidelity of `syndrome` over
/// `n_resamples` bootstrap replicas.
///
/// Each replica resamples every setting's shots with replacement. Replicas
/// that leave the bin short of shots are redrawn, at most 100 times each.
/// Replica `r` uses stream `[BOOTSTRAP, bin, r]` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn bootstrap_variance(
    shots: &[ShotRecord],
    readout: &ReadoutModel,
    calibration: &ObservableCalibration,
    design: &DMatrix<f64>,
    syndrome: Syndrome,
    n_resamples: usize,
    opts: &TomographyOptions,
    seed: u64,
) -> Result<f64> {
    use rand::Rng;
    if n_resamples < 2 {
        return Err(Error::InvalidArgument(
            "bootstrap needs at least 2 resamples".into(),
        ));
    }
    let groups = by_setting(shots);
    let fids = (0..n_resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, &[tag::BOOTSTRAP, syndrome.index() as u64, r as u64]);
            for _ in 0..MAX_REDRAWS {
                let resampled: Vec<ShotRecord> = groups
                    .iter()
                    .flat_map(|g| {
                        (0..g.len())
                            .map(|_| g[rng.random_range(0..g.len())])
                            .collect::<Vec<_>>()
                    })
                    .collect();
                let bins =
                    collect_conditioned(&resampled, readout, calibration, opts.min_bin_shots)?;
                match &bins[syndrome.index()] {
                    Ok(mv) => return Ok(reconstruct(mv, design, &opts.mle)?.fidelity),
                    Err(Error::InsufficientStatistics(_)) => continue,
                    Err(e) => return Err(e.clone()),
                }
            }
            Err(Error::InsufficientStatistics(format!(
                "bootstrap replica {r} kept emptying bin {syndrome}"
            )))
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = fids.len() as f64;
    let mean = fids.iter().sum::<f64>() / n;
    Ok(fids.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Reconstruct every syndrome bin from tomography shots.
///
/// Bins without enough shots come back as `Err(InsufficientStatistics)`.
pub fn reconstruct_bins(
    shots: &[ShotRecord],
    readout: &ReadoutModel,
    calibration: &ObservableCalibration,
    opts: &TomographyOptions,
    seed: u64,
) -> Result<Vec<Result<ReconResult>>> {
    let design = design_matrix(&calibration.observables)?;
    let bins = collect_conditioned(shots, readout, calibration, opts.min_bin_shots)?;
    Ok(bins
        .into_iter()
        .map(|bin| {
            let mv = bin?;
            let mut res = reconstruct(&mv, &design, &opts.mle)?;
            if opts.bootstrap_resamples > 0 {
                res.variance = Some(bootstrap_variance(
                    shots,
                    readout,
                    calibration,
                    &design,
                    mv.syndrome,
                    opts.bootstrap_resamples,
                    opts,
                    seed,
                )?);
            }
            Ok(res)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg;
    use crate::kernel::Pauli;

    #[test]
    fn targets_are_orthonormal_bell_states() {
        for a in Syndrome::ALL {
            for b in Syndrome::ALL {
                let ip = target_state(a).inner(&target_state(b)).norm();
                assert!((ip - f64::from(u8::from(a == b))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn targets_match_syndrome_eigenvalues() {
        let xx = linalg::kron(&Pauli::X.matrix(), &Pauli::X.matrix());
        let zz = linalg::kron(&Pauli::Z.matrix(), &Pauli::Z.matrix());
        for s in Syndrome::ALL {
            let rho = target_state(s).to_density();
            let ezz = rho.expectation(&zz);
            let exx = rho.expectation(&xx);
            assert!((ezz - if s.z_flip { -1.0 } else { 1.0 }).abs() < 1e-12);
            assert!((exx - if s.x_flip { -1.0 } else { 1.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn bin_00_target() {
        let psi = target_state("00".parse().unwrap());
        assert!((psi.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((psi.amplitudes()[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
