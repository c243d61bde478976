use std::f64::consts::PI;
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_cosine, CosineFit};
use super::shots::{bin_syndromes, run_shots};
use crate::circuits::{ideal_syndrome_probs, Device, ErrorSpec, Syndrome};
use crate::noise::NoiseModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    X,
    Y,
    Z,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 3] = [SweepAxis::X, SweepAxis::Y, SweepAxis::Z];

    pub fn vector(self) -> [f64; 3] {
        match self {
            SweepAxis::X => [1.0, 0.0, 0.0],
            SweepAxis::Y => [0.0, 1.0, 0.0],
            SweepAxis::Z => [0.0, 0.0, 1.0],
        }
    }

    /// The bin a pi rotation about this axis lands in.
    pub fn flagged_bin(self) -> Syndrome {
        match self {
            SweepAxis::X => Syndrome::new(true, false),
            SweepAxis::Y => Syndrome::new(true, true),
            SweepAxis::Z => Syndrome::new(false, true),
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X" => Ok(SweepAxis::X),
            "Y" => Ok(SweepAxis::Y),
            "Z" => Ok(SweepAxis::Z),
            _ => Err(Error::InvalidArgument(format!("unknown sweep axis `{s}`"))),
        }
    }
}

/// `n` evenly spaced angles from `-pi` to `pi` inclusive.
pub fn sweep_thetas(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| -PI + 2.0 * PI * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub const DEFAULT_SWEEP_POINTS: usize = 21;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub thetas: Vec<f64>,
    /// Bin populations per angle, ordered as [`Syndrome::ALL`].
    pub populations: Vec<[f64; 4]>,
    pub fits: [CosineFit; 4],
    /// Bin whose fitted curve has the largest amplitude.
    pub dominant_bin: usize,
    /// Fitted peak-to-trough of the dominant bin.
    pub contrast: f64,
    pub n_shots: usize,
    pub seed: u64,
}

impl SweepResult {
    /// Populations from the closed form at the same angles.
    pub fn ideal(&self) -> Result<Vec<[f64; 4]>> {
        self.thetas
            .iter()
            .map(|&t| ideal_syndrome_probs(self.axis.vector(), t))
            .collect()
    }

    /// `theta,p00,p10,p01,p11,n_shots,seed` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,p00,p10,p01,p11,n_shots,seed\n");
        for (t, p) in self.thetas.iter().zip(&self.populations) {
            writeln!(
                out,
                "{t:.12},{:.12},{:.12},{:.12},{:.12},{},{}",
                p[0], p[1], p[2], p[3], self.n_shots, self.seed
            )
            .expect("string write");
        }
        out
    }
}

/// Sweep a rotation of angle `theta` about `axis` on Q1 and record the
/// syndrome populations at each angle. Point `i` uses shot stream `i`.
pub fn sweep_error(
    device: &Device,
    noise: &NoiseModel,
    axis: SweepAxis,
    thetas: &[f64],
    n_shots: usize,
    seed: u64,
) -> Result<SweepResult> {
    if let Some(t) = thetas
        .iter()
        .find(|t| !(-PI - 1e-12..=PI + 1e-12).contains(*t))
    {
        return Err(Error::InvalidArgument(format!(
            "sweep angle {t} outside [-pi, pi]"
        )));
    }
    let populations = thetas
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let error = ErrorSpec::rotation(axis.vector(), theta)?;
            let shots = run_shots(device, noise, &error, n_shots, None, seed, i)?;
            bin_syndromes(&shots, &noise.readout)
        })
        .collect::<Result<Vec<_>>>()?;
    let fits = fit_bins(thetas, &populations)?;
    let dominant_bin = (0..4)
        .max_by(|&a, &b| fits[a].amplitude.total_cmp(&fits[b].amplitude))
        .expect("four bins");
    Ok(SweepResult {
        axis,
        thetas: thetas.to_vec(),
        populations,
        contrast: 2.0 * fits[dominant_bin].amplitude,
        dominant_bin,
        fits,
        n_shots,
        seed,
    })
}

fn fit_bins(thetas: &[f64], populations: &[[f64; 4]]) -> Result<[CosineFit; 4]> {
    let fit = |b: usize| {
        fit_cosine(
            thetas,
            &populations.iter().map(|p| p[b]).collect::<Vec<_>>(),
        )
    };
    Ok([fit(0)?, fit(1)?, fit(2)?, fit(3)?])
}
