use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shots::{bin_counts, run_shots, ShotRecord};
use crate::circuits::{Device, ErrorSpec, Q2, Q4};
use crate::kernel::linalg;
use crate::noise::{assignment_fidelity, estimate_threshold, NoiseModel};
use crate::tomography::{
    calibrate_observables, calibration_shots, reconstruct_bins, MeasSetting, ObservableCalibration,
    ReconResult, TomographyOptions,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionOptions {
    pub shots_per_setting: usize,
    /// Readout calibration shots per computational basis state.
    pub calibration_shots: usize,
    pub tomography: TomographyOptions,
}

impl Default for DetectionOptions {
    fn default() -> Self {
        Self {
            shots_per_setting: 10_000,
            calibration_shots: 1200,
            tomography: TomographyOptions::default(),
        }
    }
}

/// Reconstruction outcome for one bin; `error` is set when it was refused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinReport {
    pub bin: String,
    pub shots: usize,
    pub result: Option<ReconResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRun {
    pub error: String,
    pub counts: [usize; 4],
    pub populations: [f64; 4],
    pub bins: Vec<BinReport>,
    #[serde(skip)]
    pub shots: Vec<ShotRecord>,
}

impl DetectionRun {
    pub fn bin(&self, index: usize) -> Option<&ReconResult> {
        self.bins.get(index).and_then(|b| b.result.as_ref())
    }
}

/// Shots for every tomography setting; setting `s` uses stream `[point, s]`.
pub fn tomography_shots(
    device: &Device,
    noise: &NoiseModel,
    error: &ErrorSpec,
    shots_per_setting: usize,
    seed: u64,
    point: usize,
) -> Result<Vec<ShotRecord>> {
    let per: Vec<Vec<ShotRecord>> = MeasSetting::all()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| {
            run_shots(
                device,
                noise,
                error,
                shots_per_setting,
                Some(s),
                seed,
                point,
            )
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Readout calibration followed by the observable fit.
pub fn calibrate(
    noise: &NoiseModel,
    n_per_state: usize,
    seed: u64,
) -> Result<ObservableCalibration> {
    calibrate_observables(&calibration_shots(&noise.readout, n_per_state, seed)?)
}

/// Detection circuit with tomography on the code pair, binned by syndrome.
pub fn run_detection(
    device: &Device,
    noise: &NoiseModel,
    error: &ErrorSpec,
    opts: &DetectionOptions,
    seed: u64,
) -> Result<DetectionRun> {
    let calibration = calibrate(noise, opts.calibration_shots, seed)?;
    let shots = tomography_shots(device, noise, error, opts.shots_per_setting, seed, 0)?;
    detection_from_shots(error, shots, noise, &calibration, &opts.tomography, seed)
}

pub(crate) fn detection_from_shots(
    error: &ErrorSpec,
    shots: Vec<ShotRecord>,
    noise: &NoiseModel,
    calibration: &ObservableCalibration,
    opts: &TomographyOptions,
    seed: u64,
) -> Result<DetectionRun> {
    let counts = bin_counts(&shots, &noise.readout)?;
    let n = shots.len() as f64;
    let recon = reconstruct_bins(&shots, &noise.readout, calibration, opts, seed)?;
    let bins = recon
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let bin = crate::circuits::Syndrome::from_index(i).bits().to_string();
            match r {
                Ok(res) => Ok(BinReport {
                    bin,
                    shots: counts[i],
                    result: Some(res),
                    error: None,
                }),
                Err(e @ Error::InsufficientStatistics(_)) => Ok(BinReport {
                    bin,
                    shots: counts[i],
                    result: None,
                    error: Some(e.to_string()),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(DetectionRun {
        error: error.to_string(),
        counts,
        populations: counts.map(|c| c as f64 / n),
        bins,
        shots,
    })
}

/// Readout calibration result for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutEstimate {
    pub channel: usize,
    pub configured_fidelity: f64,
    pub threshold: f64,
    pub fidelity: f64,
    /// Shots per prepared value.
    pub shots: usize,
}

/// Prepare each of the 16 basis states `n_per_state` times, estimate every
/// channel's threshold and then its assignment fidelity at that threshold.
pub fn readout_calibration(
    noise: &NoiseModel,
    n_per_state: usize,
    seed: u64,
) -> Result<Vec<ReadoutEstimate>> {
    let shots = calibration_shots(&noise.readout, n_per_state, seed)?;
    (0..4)
        .map(|q| {
            let (mut zeros, mut ones) = (Vec::new(), Vec::new());
            for (state, values) in &shots {
                if linalg::bit(*state, q, 4) == 0 {
                    zeros.push(values[q]);
                } else {
                    ones.push(values[q]);
                }
            }
            let threshold = estimate_threshold(&zeros, &ones)?;
            let mut assigned: Vec<(u8, u8)> = zeros
                .iter()
                .map(|&v| (0, u8::from(v >= threshold)))
                .collect();
            assigned.extend(ones.iter().map(|&v| (1, u8::from(v >= threshold))));
            Ok(ReadoutEstimate {
                channel: q,
                configured_fidelity: noise.readout.channel(q)?.assignment_fidelity,
                threshold,
                fidelity: assignment_fidelity(&assigned)?,
                shots: zeros.len(),
            })
        })
        .collect()
}

/// `point,setting,m1,m2,m3,m4` rows.
pub fn shots_to_csv(shots: &[ShotRecord]) -> String {
    let mut out = String::from("point,setting,m1,m2,m3,m4\n");
    for s in shots {
        let v = s.values;
        writeln!(
            out,
            "{},{},{:.9},{:.9},{:.9},{:.9}",
            s.point, s.setting, v[0], v[1], v[2], v[3]
        )
        .expect("string write");
    }
    out
}

/// Counts of `(M2, M4)` readout values on a regular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2d {
    pub m2_edges: Vec<f64>,
    pub m4_edges: Vec<f64>,
    /// `counts[i][j]`: M2 in bin `i`, M4 in bin `j`.
    pub counts: Vec<Vec<usize>>,
}

impl Histogram2d {
    /// `n_bins` per axis over the data range; values on the top edge land in the last bin.
    pub fn from_shots(shots: &[ShotRecord], n_bins: usize) -> Result<Self> {
        if shots.is_empty() || n_bins == 0 {
            return Err(Error::InvalidArgument(
                "histogram needs shots and at least one bin".into(),
            ));
        }
        let range = |q: usize| {
            let (lo, hi) = shots
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                    (lo.min(s.values[q]), hi.max(s.values[q]))
                });
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let edges = |(lo, hi): (f64, f64)| {
            (0..=n_bins)
                .map(|i| lo + (hi - lo) * i as f64 / n_bins as f64)
                .collect::<Vec<_>>()
        };
        let (r2, r4) = (range(Q2), range(Q4));
        let index = |v: f64, (lo, hi): (f64, f64)| {
            (((v - lo) / (hi - lo) * n_bins as f64) as usize).min(n_bins - 1)
        };
        let mut counts = vec![vec![0; n_bins]; n_bins];
        for s in shots {
            counts[index(s.values[Q2], r2)][index(s.values[Q4], r4)] += 1;
        }
        Ok(Self {
            m2_edges: edges(r2),
            m4_edges: edges(r4),
            counts,
        })
    }

    /// Rows `m2_lo,m4_lo,count`, blank line between M2 bins.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m2_lo,m4_lo,count\n");
        for (i, row) in self.counts.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                writeln!(out, "{:.9},{:.9},{c}", self.m2_edges[i], self.m4_edges[j])
                    .expect("string write");
            }
            out.push('\n');
        }
        out
    }
}
