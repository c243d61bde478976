//! Calibrated depolarizing against simulated randomized benchmarking.

use sublattice::circuits::Device;
use sublattice::noise::{DepolarizingParams, NoiseModel};
use sublattice::rb::{calibrate_ecr_depolarizing, run_pair_rb, MEASURED_CLIFFORD_ERRORS};

const LENGTHS: [usize; 8] = [1, 3, 6, 10, 15, 22, 32, 45];

fn depolarizing_base() -> NoiseModel {
    NoiseModel {
        depolarizing: Some(DepolarizingParams::new(0.0, vec![]).unwrap()),
        ..NoiseModel::off(4)
    }
}

#[test]
fn rb_recovers_programmed_depolarizing() {
    let dev = Device::default();
    let noise = depolarizing_base()
        .with_calibrated_ecr(&dev, &MEASURED_CLIFFORD_ERRORS)
        .unwrap();
    let decay = run_pair_rb(&dev, &noise, (0, 1), &LENGTHS, 50, 2024).unwrap();
    let rel = (decay.error_per_clifford - 0.0604).abs() / 0.0604;
    assert!(
        rel < 0.05,
        "r = {} +- {}",
        decay.error_per_clifford,
        decay.error_std
    );
}

#[test]
fn depolarizing_calibration_hits_every_target() {
    let dev = Device::default();
    for c in
        calibrate_ecr_depolarizing(&dev, &depolarizing_base(), &MEASURED_CLIFFORD_ERRORS).unwrap()
    {
        assert_eq!(c.coherence_limited_error, 0.0);
        assert!((c.achieved_error - c.target_error).abs() < 1e-9, "{c:?}");
        assert!(c.lambda > 0.0 && c.lambda < 0.2);
    }
}

#[test]
fn coherence_floor_is_bounded() {
    let dev = Device::default();
    for c in calibrate_ecr_depolarizing(
        &dev,
        &NoiseModel::measured_coherence(),
        &MEASURED_CLIFFORD_ERRORS,
    )
    .unwrap()
    {
        assert!((0.01..=0.10).contains(&c.coherence_limited_error), "{c:?}");
        if c.coherence_limited_error < c.target_error {
            assert!((c.achieved_error - c.target_error).abs() < 1e-9);
        } else {
            assert_eq!(c.lambda, 0.0);
        }
    }
}

#[test]
fn coherence_only_rb_matches_the_floor() {
    let dev = Device::default();
    let noise = NoiseModel::measured_coherence();
    let cal = calibrate_ecr_depolarizing(&dev, &noise, &MEASURED_CLIFFORD_ERRORS).unwrap();
    for (i, &(c, t)) in dev.topology.ecr_pairs.iter().enumerate() {
        let decay = run_pair_rb(&dev, &noise, (c, t), &LENGTHS, 20, i as u64).unwrap();
        assert!(
            (0.01..=0.10).contains(&decay.error_per_clifford),
            "pair {i}: r = {}",
            decay.error_per_clifford
        );
        let floor = cal[i].coherence_limited_error;
        let rel = (decay.error_per_clifford - floor).abs() / floor;
        assert!(
            rel < 0.2,
            "pair {i}: r = {} vs floor {floor}",
            decay.error_per_clifford
        );
    }
}
