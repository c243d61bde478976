//! Fitting ECR depolarizing strengths to target errors per Clifford.
//!
//! A depolarizing step inside a trace-preserving circuit shifts the
//! entanglement fidelity as `F -> (1 - lambda) F + lambda / d^2`, wherever it
//! sits. A Clifford compiled with `k` ECRs therefore has
//! `F(lambda) = (1 - lambda)^k (F_0 - 1/d^2) + 1/d^2`, where `F_0` is its
//! fidelity without ECR depolarizing. Averaging over the group gives the RB
//! decay constant in closed form, so the calibration needs one noisy
//! simulation per group element and a scalar root find.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clifford::clifford_group;
use super::ptm::{circuit_ptm, ptm_fidelity, tableau_ptm};
use super::sequence::clifford_layers;
use crate::circuits::{Circuit, Device, GateKind};
use crate::kernel::linalg::{self, CMatrix, ZERO};
use crate::kernel::DensityMatrix;
use crate::noise::{apply_noisy_circuit, DepolarizingParams, NoiseModel};
use crate::{Error, Result};

/// Measured errors per two-qubit Clifford, in native-pair order.
pub const MEASURED_CLIFFORD_ERRORS: [f64; 4] = [0.0604, 0.0631, 0.0569, 0.0353];

/// Single-qubit gate infidelity (gate fidelity 0.998).
pub const MEASURED_SINGLE_QUBIT_ERROR: f64 = 0.002;

/// Entanglement fidelity of the noisy `circuit` to the unitary `ideal`.
pub fn entanglement_fidelity(
    circuit: &Circuit,
    noise: &NoiseModel,
    ideal: &CMatrix,
) -> Result<f64> {
    let n = circuit.n_qubits();
    let d = linalg::dim_of(n);
    let mut total = ZERO;
    for i in 0..d {
        for j in 0..d {
            let mut basis = CMatrix::zeros(d, d);
            basis[(i, j)] = linalg::ONE;
            let out =
                apply_noisy_circuit(circuit, noise, &DensityMatrix::new_unchecked(n, basis)?)?;
            let back = ideal.adjoint() * out.matrix() * ideal;
            total += back[(i, j)];
        }
    }
    Ok(total.re / (d * d) as f64)
}

/// Average gate infidelity from an entanglement fidelity.
pub fn infidelity_from_entanglement(f_e: f64, d: usize) -> f64 {
    let d = d as f64;
    d * (1.0 - f_e) / (d + 1.0)
}

/// `(ECR count, fidelity without ECR depolarizing)` for every two-qubit Clifford.
pub fn clifford_profile(
    pair_device: &Device,
    pair_noise: &NoiseModel,
) -> Result<Vec<(usize, f64)>> {
    let group = clifford_group(2)?;
    let mut base = pair_noise.clone();
    if let Some(d) = base.depolarizing.as_mut() {
        for e in d.ecr.iter_mut() {
            e.1 = 0.0;
        }
    }
    group
        .elements()
        .par_iter()
        .map(|e| {
            let mut c = Circuit::new("clifford", 2);
            for layer in clifford_layers(pair_device, e)? {
                c.push_layer(layer)?;
            }
            let k = c.count(|op| op.kind == GateKind::Ecr);
            Ok((
                k,
                ptm_fidelity(&tableau_ptm(&e.tableau)?, &circuit_ptm(&c, &base)?),
            ))
        })
        .collect()
}

/// Group-averaged error per Clifford for ECR depolarizing `lambda`.
pub fn profile_error(profile: &[(usize, f64)], lambda: f64) -> f64 {
    let floor = 1.0 / 16.0;
    let mean_f = profile
        .iter()
        .map(|&(k, f0)| (1.0 - lambda).powi(k as i32) * (f0 - floor) + floor)
        .sum::<f64>()
        / profile.len() as f64;
    infidelity_from_entanglement(mean_f, 4)
}

/// Calibration outcome for one native pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCalibration {
    pub pair: (usize, usize),
    pub target_error: f64,
    /// Error per Clifford from decoherence and single-qubit depolarizing alone.
    pub coherence_limited_error: f64,
    pub lambda: f64,
    pub achieved_error: f64,
}

/// Single-qubit depolarizing strength so that single-qubit RB on `device`,
/// averaged over its qubits, gives error per Clifford `target`.
///
/// Every single-qubit Clifford is one pulse, so the error per Clifford is the
/// infidelity of one pulse slot: decoherence for the pulse duration followed
/// by depolarizing. Returns 0 if decoherence alone exceeds `target`.
pub fn calibrate_single_qubit_depolarizing(
    device: &Device,
    noise: &NoiseModel,
    target: f64,
) -> Result<f64> {
    if !(0.0..0.5).contains(&target) {
        return Err(Error::InvalidArgument(format!(
            "target error {target} outside [0, 0.5)"
        )));
    }
    let n = device.n_qubits();
    let slot = device.durations.single_qubit_ns;
    let mut f0 = 0.0;
    for q in 0..n {
        f0 += match &noise.coherence {
            Some(c) if slot > 0.0 => {
                let ops = c.channel(q, slot)?;
                ops.operators()
                    .iter()
                    .map(|k| k.trace().norm_sqr())
                    .sum::<f64>()
                    / 4.0
            }
            _ => 1.0,
        };
    }
    let f0 = f0 / n as f64;
    // F = (1 - l)(F0 - 1/4) + 1/4 and r = 2(1 - F)/3.
    let f_target = 1.0 - 1.5 * target;
    if f0 <= f_target {
        return Ok(0.0);
    }
    Ok((1.0 - (f_target - 0.25) / (f0 - 0.25)).clamp(0.0, 1.0))
}

/// Depolarizing strength per ECR so that the group-averaged error per
/// Clifford equals `targets[i]` on pair `i` of the device.
///
/// If decoherence alone already exceeds a target, that pair gets
/// `lambda = 0` and the achieved error is reported as is.
///
/// Results are cached per `(device, noise, targets)` for the process lifetime.
pub fn calibrate_ecr_depolarizing(
    device: &Device,
    noise: &NoiseModel,
    targets: &[f64],
) -> Result<Vec<PairCalibration>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Vec<PairCalibration>>>> = OnceLock::new();
    let key = format!(
        "{device:?}|{:?}|{:?}|{targets:?}",
        noise.coherence,
        noise.depolarizing.as_ref().map(|d| d.single_qubit)
    );
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("calibration cache").get(&key) {
        return Ok(hit.clone());
    }
    let out = calibrate_uncached(device, noise, targets)?;
    cache
        .lock()
        .expect("calibration cache")
        .insert(key, out.clone());
    Ok(out)
}

fn calibrate_uncached(
    device: &Device,
    noise: &NoiseModel,
    targets: &[f64],
) -> Result<Vec<PairCalibration>> {
    let pairs = &device.topology.ecr_pairs;
    if targets.len() != pairs.len() {
        return Err(Error::DimensionMismatch {
            expected: pairs.len(),
            got: targets.len(),
        });
    }
    let mut base = noise.clone();
    let single = base.depolarizing.as_ref().map_or(0.0, |d| d.single_qubit);
    base.depolarizing = Some(DepolarizingParams::new(
        single,
        pairs.iter().map(|&p| (p, 0.0)).collect(),
    )?);
    pairs
        .iter()
        .zip(targets)
        .map(|(&(c, t), &target)| {
            if !(0.0..0.75).contains(&target) {
                return Err(Error::InvalidArgument(format!(
                    "target error {target} outside [0, 0.75)"
                )));
            }
            let qubits = [c, t];
            let profile =
                clifford_profile(&device.restricted(&qubits)?, &base.restricted(&qubits)?)?;
            let floor = profile_error(&profile, 0.0);
            let lambda = if floor >= target {
                0.0
            } else {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if profile_error(&profile, mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            };
            Ok(PairCalibration {
                pair: (c, t),
                target_error: target,
                coherence_limited_error: floor,
                lambda,
                achieved_error: profile_error(&profile, lambda),
            })
        })
        .collect()
}
