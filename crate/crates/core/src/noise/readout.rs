use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc_inv;

use crate::{Error, Result};

const FIDELITY_TOL: f64 = 1e-6;

/// One readout channel: two Gaussian classes on a scalar axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutChannel {
    pub assignment_fidelity: f64,
    pub mean0: f64,
    pub mean1: f64,
    pub sigma: f64,
    pub threshold: f64,
}

impl ReadoutChannel {
    /// Symmetric classes at -1 and +1 with `sigma` solved from the target
    /// fidelity, so that `P(0|1) = P(1|0) = 1 - F`.
    pub fn from_fidelity(fidelity: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&fidelity) {
            return Err(Error::InvalidArgument(format!(
                "assignment fidelity {fidelity} outside [0.5, 1]"
            )));
        }
        let sigma = if fidelity == 1.0 {
            0.0
        } else {
            1.0 / (std::f64::consts::SQRT_2 * erfc_inv(2.0 * (1.0 - fidelity)))
        };
        let ch = Self {
            assignment_fidelity: fidelity,
            mean0: -1.0,
            mean1: 1.0,
            sigma,
            threshold: 0.0,
        };
        let (p01, p10) = ch.error_rates();
        let implied = 1.0 - 0.5 * (p01 + p10);
        if (implied - fidelity).abs() > FIDELITY_TOL {
            return Err(Error::Numerical(format!(
                "readout sigma {sigma} implies fidelity {implied}, target {fidelity}"
            )));
        }
        Ok(ch)
    }

    /// Analytic `(P(0|1), P(1|0))`.
    pub fn error_rates(&self) -> (f64, f64) {
        if self.sigma == 0.0 {
            let p01 = f64::from(u8::from(self.mean1 < self.threshold));
            let p10 = f64::from(u8::from(self.mean0 >= self.threshold));
            return (p01, p10);
        }
        let n0 = Normal::new(self.mean0, self.sigma).expect("positive sigma");
        let n1 = Normal::new(self.mean1, self.sigma).expect("positive sigma");
        (n1.cdf(self.threshold), n0.sf(self.threshold))
    }

    /// Scalar response for a projected `bit`.
    pub fn sample<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> f64 {
        let mean = if bit == 0 { self.mean0 } else { self.mean1 };
        if self.sigma == 0.0 {
            return mean;
        }
        let z: f64 = rng.sample(StandardNormal);
        mean + self.sigma * z
    }

    /// Exactly-at-threshold values read as 1.
    pub fn binarize(&self, value: f64) -> u8 {
        u8::from(value >= self.threshold)
    }

    /// Normalized +1 (`|0>`) / -1 (`|1>`) value of a binarized shot.
    pub fn sign(&self, value: f64) -> f64 {
        1.0 - 2.0 * f64::from(self.binarize(value))
    }
}

/// Readout for every measurement channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub channels: Vec<ReadoutChannel>,
}

impl ReadoutModel {
    pub fn from_fidelities(fidelities: &[f64]) -> Result<Self> {
        Ok(Self {
            channels: fidelities
                .iter()
                .map(|&f| ReadoutChannel::from_fidelity(f))
                .collect::<Result<_>>()?,
        })
    }

    /// Measured assignment fidelities of channels M1..M4.
    pub fn measured() -> Self {
        Self::from_fidelities(&MEASURED_ASSIGNMENT_FIDELITIES).expect("valid fidelities")
    }

    /// Noise-free readout: responses sit on the class means.
    pub fn ideal(n_channels: usize) -> Self {
        Self::from_fidelities(&vec![1.0; n_channels]).expect("valid fidelities")
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, channel: usize) -> Result<&ReadoutChannel> {
        self.channels
            .get(channel)
            .ok_or_else(|| Error::InvalidArgument(format!("no readout channel {channel}")))
    }

    pub fn sample_readout<R: Rng + ?Sized>(
        &self,
        bit: u8,
        channel: usize,
        rng: &mut R,
    ) -> Result<f64> {
        Ok(self.channel(channel)?.sample(bit, rng))
    }

    pub fn binarize(&self, value: f64, channel: usize) -> Result<u8> {
        Ok(self.channel(channel)?.binarize(value))
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.threshold).collect()
    }
}

pub const MEASURED_ASSIGNMENT_FIDELITIES: [f64; 4] = [0.9592, 0.9476, 0.9416, 0.9646];

/// `1 - P(0|1)/2 - P(1|0)/2` from `(prepared, assigned)` pairs.
pub fn assignment_fidelity(shots: &[(u8, u8)]) -> Result<f64> {
    let mut counts = [[0usize; 2]; 2];
    for &(prepared, assigned) in shots {
        if prepared > 1 || assigned > 1 {
            return Err(Error::InvalidArgument(format!(
                "shot ({prepared}, {assigned}) is not binary"
            )));
        }
        counts[prepared as usize][assigned as usize] += 1;
    }
    let n0 = counts[0][0] + counts[0][1];
    let n1 = counts[1][0] + counts[1][1];
    if n0 == 0 || n1 == 0 {
        return Err(Error::InsufficientStatistics(
            "assignment fidelity needs shots of both prepared states".into(),
        ));
    }
    let p10 = counts[0][1] as f64 / n0 as f64;
    let p01 = counts[1][0] as f64 / n1 as f64;
    Ok(1.0 - 0.5 * p01 - 0.5 * p10)
}

/// Threshold maximizing the separation of the two empirical CDFs.
pub fn estimate_threshold(zeros: &[f64], ones: &[f64]) -> Result<f64> {
    if zeros.is_empty() || ones.is_empty() {
        return Err(Error::InsufficientStatistics(
            "threshold estimation needs shots of both prepared states".into(),
        ));
    }
    let mut all: Vec<(f64, bool)> = zeros
        .iter()
        .map(|&v| (v, false))
        .chain(ones.iter().map(|&v| (v, true)))
        .collect();
    if all.iter().any(|(v, _)| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite readout value".into()));
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (n0, n1) = (zeros.len() as f64, ones.len() as f64);
    let (mut below0, mut below1) = (0usize, 0usize);
    let mut best = (f64::NEG_INFINITY, all[0].0);
    let mut i = 0;
    while i < all.len() {
        // Candidate threshold at all[i].0: everything strictly below reads 0.
        let score = below0 as f64 / n0 - below1 as f64 / n1;
        if score > best.0 {
            best = (score, all[i].0);
        }
        let v = all[i].0;
        while i < all.len() && all[i].0 == v {
            if all[i].1 {
                below1 += 1;
            } else {
                below0 += 1;
            }
            i += 1;
        }
    }
    let prev = all.iter().rev().map(|a| a.0).find(|&v| v < best.1);
    // Midpoint between the neighbouring samples.
    Ok(prev.map_or(best.1, |p| 0.5 * (p + best.1)))
}
