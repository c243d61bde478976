use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::design::N_ROWS;
use super::observables::ObservableCalibration;
use super::settings::N_SETTINGS;
use crate::circuits::Syndrome;
use crate::noise::ReadoutModel;
use crate::protocol::ShotRecord;
use crate::{Error, Result};

/// Bins with fewer shots than this are not reconstructed.
pub const DEFAULT_MIN_BIN_SHOTS: usize = 100;

/// The 108 conditioned expectation values of one syndrome bin.
///
/// Row `3u + k` holds observable `O_{k+1}` under setting `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector {
    pub syndrome: Syndrome,
    pub values: Vec<f64>,
    /// Variance of each mean.
    pub variances: Vec<f64>,
    pub counts: Vec<usize>,
}

impl MeasurementVector {
    pub fn shots(&self) -> usize {
        self.counts.iter().step_by(3).sum()
    }

    /// `setting,observable,value,variance,n` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("setting,observable,value,variance,n\n");
        for (row, ((v, var), n)) in self
            .values
            .iter()
            .zip(&self.variances)
            .zip(&self.counts)
            .enumerate()
        {
            writeln!(out, "{},O{},{v:.12e},{var:.12e},{n}", row / 3, row % 3 + 1)
                .expect("string write");
        }
        out
    }
}

#[derive(Default, Clone, Copy)]
struct Acc {
    n: usize,
    sum: [f64; 3],
    sum_sq: [f64; 3],
}

/// Split shots by syndrome bin and average the code-pair observables per
/// setting.
///
/// The single-shot variance is floored at `1/n` so deterministic data still
/// gives positive weights. A bin with fewer than `min_shots` shots, or none
/// at some setting, yields `Error::InsufficientStatistics`.
pub fn collect_conditioned(
    shots: &[ShotRecord],
    readout: &ReadoutModel,
    calibration: &ObservableCalibration,
    min_shots: usize,
) -> Result<Vec<Result<MeasurementVector>>> {
    let mut acc = vec![[Acc::default(); N_SETTINGS]; 4];
    for shot in shots {
        if shot.setting >= N_SETTINGS {
            return Err(Error::InvalidArgument(format!(
                "shot with setting {}",
                shot.setting
            )));
        }
        let bin = shot.syndrome(readout)?.index();
        let (s1, s3) = calibration.code_signs(&shot.values);
        let a = &mut acc[bin][shot.setting];
        a.n += 1;
        for (k, v) in [s1, s3, s1 * s3].into_iter().enumerate() {
            a.sum[k] += v;
            a.sum_sq[k] += v * v;
        }
    }
    Ok(Syndrome::ALL
        .iter()
        .zip(&acc)
        .map(|(&syndrome, per_setting)| {
            let total: usize = per_setting.iter().map(|a| a.n).sum();
            if total < min_shots {
                return Err(Error::InsufficientStatistics(format!(
                    "bin {syndrome} has {total} shots, need {min_shots}"
                )));
            }
            if let Some(u) = per_setting.iter().position(|a| a.n == 0) {
                return Err(Error::InsufficientStatistics(format!(
                    "bin {syndrome} has no shots at setting {u}"
                )));
            }
            let mut values = Vec::with_capacity(N_ROWS);
            let mut variances = Vec::with_capacity(N_ROWS);
            let mut counts = Vec::with_capacity(N_ROWS);
            for a in per_setting {
                let n = a.n as f64;
                for k in 0..3 {
                    let mean = a.sum[k] / n;
                    let var = (a.sum_sq[k] / n - mean * mean).max(1.0 / n);
                    values.push(mean);
                    variances.push(var / n);
                    counts.push(a.n);
                }
            }
            Ok(MeasurementVector {
                syndrome,
                values,
                variances,
                counts,
            })
        })
        .collect())
}
