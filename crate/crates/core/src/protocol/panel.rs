use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shots::{bin_syndromes, run_shots};
use super::sweep::{SweepAxis, SweepResult};
use crate::circuits::{ideal_syndrome_probs, Device, ErrorSpec};
use crate::noise::NoiseModel;
use crate::{Error, Result};

/// Smallest calibration span a bin may have before renormalization is refused.
pub const MIN_CALIBRATION_CONTRAST: f64 = 0.1;

/// Per-bin `(floor, ceiling)` taken from fitted calibration curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelCalibration {
    pub bounds: [(f64, f64); 4],
}

impl PanelCalibration {
    /// Bin `10` uses the X sweep, `01` the Z sweep, `11` the Y sweep. Bin `00`
    /// averages the extrema of its curve over all three sweeps.
    pub fn from_sweeps(sweeps: &[SweepResult]) -> Result<Self> {
        let find = |axis: SweepAxis| {
            sweeps
                .iter()
                .find(|s| s.axis == axis)
                .ok_or_else(|| Error::InvalidArgument(format!("no {axis:?} calibration sweep")))
        };
        let (x, y, z) = (
            find(SweepAxis::X)?,
            find(SweepAxis::Y)?,
            find(SweepAxis::Z)?,
        );
        let ext = |s: &SweepResult, b: usize| (s.fits[b].min(), s.fits[b].max());
        let zero = [x, y, z].map(|s| ext(s, 0));
        let cal = Self {
            bounds: [
                (
                    zero.iter().map(|e| e.0).sum::<f64>() / 3.0,
                    zero.iter().map(|e| e.1).sum::<f64>() / 3.0,
                ),
                ext(x, 1),
                ext(z, 2),
                ext(y, 3),
            ],
        };
        if let Some((b, (lo, hi))) = cal
            .bounds
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| hi - lo < MIN_CALIBRATION_CONTRAST)
        {
            return Err(Error::Numerical(format!(
                "calibration contrast {:.4} of bin {b} is below {MIN_CALIBRATION_CONTRAST}",
                hi - lo
            )));
        }
        Ok(cal)
    }

    /// `x -> (x - floor) / (ceiling - floor)` per bin, without clipping.
    pub fn apply(&self, raw: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|b| {
            let (lo, hi) = self.bounds[b];
            (raw[b] - lo) / (hi - lo)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelEntry {
    pub error: String,
    pub raw: [f64; 4],
    pub calibrated: Option<[f64; 4]>,
    pub ideal: [f64; 4],
}

/// Closed-form bin probabilities of a composite error, via its axis and angle.
pub fn ideal_panel_probs(error: &ErrorSpec) -> Result<[f64; 4]> {
    if error.is_none() {
        return Ok([1.0, 0.0, 0.0, 0.0]);
    }
    let (axis, angle) = error.axis_angle();
    ideal_syndrome_probs(axis, angle)
}

/// Measure each error in `errors` and, given a calibration, renormalize.
/// Entry `i` uses shot stream `i`.
pub fn arbitrary_error_panel(
    device: &Device,
    noise: &NoiseModel,
    errors: &[ErrorSpec],
    n_shots: usize,
    calibration: Option<&PanelCalibration>,
    seed: u64,
) -> Result<Vec<PanelEntry>> {
    errors
        .par_iter()
        .enumerate()
        .map(|(i, error)| {
            let raw = bin_syndromes(
                &run_shots(device, noise, error, n_shots, None, seed, i)?,
                &noise.readout,
            )?;
            Ok(PanelEntry {
                error: error.to_string(),
                raw,
                calibrated: calibration.map(|c| c.apply(&raw)),
                ideal: ideal_panel_probs(error)?,
            })
        })
        .collect()
}

/// The eight errors of the standard panel.
pub fn standard_panel() -> Vec<ErrorSpec> {
    [
        "Y60", "X60", "X60Y60", "X60Y120", "X120Y60", "X120Y120", "R", "H",
    ]
    .iter()
    .map(|s| s.parse().expect("valid error"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::sweep::{sweep_error, sweep_thetas};

    #[test]
    fn y60_and_composites() {
        let p = ideal_panel_probs(&"Y60".parse().unwrap()).unwrap();
        assert!((p[0] - 0.75).abs() < 1e-12 && (p[3] - 0.25).abs() < 1e-12);
        let r = ideal_panel_probs(&"R".parse().unwrap()).unwrap();
        assert!(r.iter().all(|v| (v - 0.25).abs() < 1e-12), "{r:?}");
        let h = ideal_panel_probs(&ErrorSpec::hadamard()).unwrap();
        assert!(h[0].abs() < 1e-12 && (h[1] - 0.5).abs() < 1e-12 && (h[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noiseless_calibration_is_identity_within_sampling() {
        let dev = Device::default();
        let off = NoiseModel::off(4);
        let sweeps: Vec<_> = SweepAxis::ALL
            .iter()
            .map(|&a| sweep_error(&dev, &off, a, &sweep_thetas(21), 4096, 1).unwrap())
            .collect();
        let cal = PanelCalibration::from_sweeps(&sweeps).unwrap();
        for (lo, hi) in cal.bounds {
            assert!(lo.abs() < 0.02 && (hi - 1.0).abs() < 0.02, "{lo} {hi}");
        }
    }

    #[test]
    fn flat_calibration_is_refused() {
        let dev = Device::default();
        let off = NoiseModel::off(4);
        let mut sweeps: Vec<_> = SweepAxis::ALL
            .iter()
            .map(|&a| sweep_error(&dev, &off, a, &sweep_thetas(9), 64, 1).unwrap())
            .collect();
        sweeps[0].fits[1].amplitude = 0.01;
        assert!(matches!(
            PanelCalibration::from_sweeps(&sweeps),
            Err(Error::Numerical(_))
        ));
        assert!(PanelCalibration::from_sweeps(&sweeps[1..]).is_err());
    }
}
