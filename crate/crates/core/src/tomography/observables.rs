//! Observables of the code-pair readout, built from basis-state calibration shots.

use serde::{Deserialize, Serialize};

use crate::circuits::{Q1, Q3};
use crate::kernel::linalg::{self, CMatrix};
use crate::noise::ReadoutModel;
use crate::rng::{stream, tag};
use crate::{Error, Result};

/// Affine map sending the mean `|0>` response to +1 and the mean `|1>`
/// response to -1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotNormalization {
    pub midpoint: f64,
    pub half_span: f64,
}

impl ShotNormalization {
    pub fn from_means(mean0: f64, mean1: f64) -> Result<Self> {
        let half_span = 0.5 * (mean0 - mean1);
        if !(half_span.abs() > 0.0) {
            return Err(Error::Numerical("readout classes have equal means".into()));
        }
        Ok(Self {
            midpoint: 0.5 * (mean0 + mean1),
            half_span,
        })
    }

    pub fn normalize(&self, value: f64) -> f64 {
        (value - self.midpoint) / self.half_span
    }

    /// Thresholded `+-1` value; a shot on the midpoint counts as `|1>`.
    pub fn sign(&self, value: f64) -> f64 {
        if self.normalize(value) > 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Per-channel normalization and the three code-pair observables
/// `O1, O2, O3`, which are `ZI, IZ, ZZ` for perfect readout.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableCalibration {
    pub normalization: Vec<ShotNormalization>,
    pub observables: [CMatrix; 3],
}

impl ObservableCalibration {
    /// `(s1, s3)` signs of one shot on the code pair.
    pub fn code_signs(&self, values: &[f64; 4]) -> (f64, f64) {
        (
            self.normalization[Q1].sign(values[Q1]),
            self.normalization[Q3].sign(values[Q3]),
        )
    }

    /// The ideal observables with unit normalization.
    pub fn ideal() -> Self {
        let z = linalg::pauli_z();
        let id = linalg::identity(2);
        Self {
            normalization: vec![
                ShotNormalization {
                    midpoint: 0.0,
                    half_span: -1.0
                };
                4
            ],
            observables: [
                linalg::kron(&z, &id),
                linalg::kron(&id, &z),
                linalg::kron(&z, &z),
            ],
        }
    }
}

/// Readout of each of the 16 basis states, `n_per_state` times.
///
/// Shots are `(prepared basis index, values)`; state `s` uses stream
/// `[READOUT_CALIBRATION, s]`.
pub fn calibration_shots(
    readout: &ReadoutModel,
    n_per_state: usize,
    seed: u64,
) -> Result<Vec<(usize, [f64; 4])>> {
    let mut out = Vec::with_capacity(16 * n_per_state);
    for state in 0..16 {
        let mut rng = stream(seed, &[tag::READOUT_CALIBRATION, state as u64]);
        for _ in 0..n_per_state {
            let mut values = [0.0; 4];
            for (q, v) in values.iter_mut().enumerate() {
                *v = readout.sample_readout(linalg::bit(state, q, 4) as u8, q, &mut rng)?;
            }
            out.push((state, values));
        }
    }
    Ok(out)
}

/// Build the normalization and observables from calibration shots.
///
/// Each observable is diagonal: its entry for code-pair state `|ab>` is the
/// mean thresholded response (`s1`, `s3` or `s1 s3`) over shots whose Q1 and
/// Q3 were prepared in `a` and `b`.
pub fn calibrate_observables(shots: &[(usize, [f64; 4])]) -> Result<ObservableCalibration> {
    let mut seen = [0usize; 16];
    for &(state, _) in shots {
        if state >= 16 {
            return Err(Error::InvalidArgument(format!(
                "basis state {state} out of range"
            )));
        }
        seen[state] += 1;
    }
    if let Some(missing) = seen.iter().position(|&n| n == 0) {
        return Err(Error::InsufficientStatistics(format!(
            "no calibration shots for basis state {missing:04b}"
        )));
    }
    let mut normalization = Vec::with_capacity(4);
    for q in 0..4 {
        let mut sums = [0.0; 2];
        let mut counts = [0usize; 2];
        for (state, values) in shots {
            let b = linalg::bit(*state, q, 4);
            sums[b] += values[q];
            counts[b] += 1;
        }
        normalization.push(ShotNormalization::from_means(
            sums[0] / counts[0] as f64,
            sums[1] / counts[1] as f64,
        )?);
    }
    let mut acc = [[0.0; 4]; 3];
    let mut counts = [0usize; 4];
    for (state, values) in shots {
        let pair = 2 * linalg::bit(*state, Q1, 4) + linalg::bit(*state, Q3, 4);
        let s1 = normalization[Q1].sign(values[Q1]);
        let s3 = normalization[Q3].sign(values[Q3]);
        for (k, v) in [s1, s3, s1 * s3].into_iter().enumerate() {
            acc[k][pair] += v;
        }
        counts[pair] += 1;
    }
    let observables = acc.map(|row| {
        let mut m = CMatrix::zeros(4, 4);
        for (i, v) in row.iter().enumerate() {
            m[(i, i)] = linalg::c(v / counts[i] as f64, 0.0);
        }
        m
    });
    Ok(ObservableCalibration {
        normalization,
        observables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_readout_gives_pauli_observables() {
        let cal = calibrate_observables(&calibration_shots(&ReadoutModel::ideal(4), 3, 0).unwrap())
            .unwrap();
        let ideal = ObservableCalibration::ideal();
        for k in 0..3 {
            assert_eq!(cal.observables[k], ideal.observables[k]);
        }
    }

    #[test]
    fn symmetric_assignment_error_shrinks_observables() {
        let readout = ReadoutModel::measured();
        let cal = calibrate_observables(&calibration_shots(&readout, 19200, 4).unwrap()).unwrap();
        let e1 = 1.0 - readout.channels[Q1].assignment_fidelity;
        let e3 = 1.0 - readout.channels[Q3].assignment_fidelity;
        let z = [1.0, 1.0, -1.0, -1.0];
        let z3 = [1.0, -1.0, 1.0, -1.0];
        for i in 0..4 {
            let o = |k: usize| cal.observables[k][(i, i)].re;
            assert!((o(0) - (1.0 - 2.0 * e1) * z[i]).abs() < 0.02);
            assert!((o(1) - (1.0 - 2.0 * e3) * z3[i]).abs() < 0.02);
            assert!((o(2) - (1.0 - 2.0 * e1) * (1.0 - 2.0 * e3) * z[i] * z3[i]).abs() < 0.02);
        }
    }

    #[test]
    fn missing_state_is_refused() {
        let shots: Vec<_> = calibration_shots(&ReadoutModel::ideal(4), 1, 0)
            .unwrap()
            .into_iter()
            .filter(|s| s.0 != 5)
            .collect();
        assert!(matches!(
            calibrate_observables(&shots),
            Err(Error::InsufficientStatistics(_))
        ));
    }
}
