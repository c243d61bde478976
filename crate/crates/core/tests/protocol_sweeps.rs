//! Sweeps, panels and the robustness study against closed forms and dense simulation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use sublattice::circuits::{
    condition_on_syndromes, detection_circuit, Device, ErrorSpec, Syndrome,
};
use sublattice::kernel::linalg::{self, CMatrix};
use sublattice::kernel::{DensityMatrix, StateVector};
use sublattice::noise::{apply_noisy_circuit, NoiseModel};
use sublattice::protocol::*;
use sublattice::tomography::target_state;

fn probs_by_brute_force(u: &CMatrix) -> [f64; 4] {
    // Q1 error applied to the codeword, then the parities read off directly.
    let psi = target_state(Syndrome::new(false, false));
    let v = linalg::kron(u, &linalg::identity(2))
        * nalgebra::DVector::from_column_slice(psi.amplitudes());
    let zz = linalg::kron(&linalg::pauli_z(), &linalg::pauli_z());
    let xx = linalg::kron(&linalg::pauli_x(), &linalg::pauli_x());
    let id = linalg::identity(4);
    let mut out = [0.0; 4];
    for s in Syndrome::ALL {
        let pz =
            (&id + &zz * linalg::c(if s.z_flip { -1.0 } else { 1.0 }, 0.0)) * linalg::c(0.5, 0.0);
        let px =
            (&id + &xx * linalg::c(if s.x_flip { -1.0 } else { 1.0 }, 0.0)) * linalg::c(0.5, 0.0);
        out[s.index()] = (px * pz * &v).norm_squared();
    }
    out
}

#[test]
fn panel_ideals_match_brute_force() {
    for e in standard_panel() {
        let ideal = ideal_panel_probs(&e).unwrap();
        let brute = probs_by_brute_force(&e.unitary());
        for b in 0..4 {
            assert!(
                (ideal[b] - brute[b]).abs() < 1e-12,
                "{e}: {ideal:?} vs {brute:?}"
            );
        }
    }
}

#[test]
fn noiseless_panel_raw_matches_ideal() {
    let dev = Device::default();
    let panel = arbitrary_error_panel(&dev, &NoiseModel::off(4), &standard_panel(), 4096, None, 11)
        .unwrap();
    assert_eq!(panel.len(), 8);
    for e in &panel {
        assert!(e.calibrated.is_none());
        for b in 0..4 {
            assert!(
                (e.raw[b] - e.ideal[b]).abs() < 5.0 / 64.0,
                "{}: {:?} vs {:?}",
                e.error,
                e.raw,
                e.ideal
            );
        }
    }
}

#[test]
fn noiseless_x_sweep_flags_bit_flip_at_pi() {
    let dev = Device::default();
    let res = sweep_error(
        &dev,
        &NoiseModel::off(4),
        SweepAxis::X,
        &[-PI, 0.0, PI, FRAC_PI_2],
        1000,
        2,
    )
    .unwrap();
    assert_eq!(res.populations[0], [0.0, 1.0, 0.0, 0.0]);
    assert_eq!(res.populations[1], [1.0, 0.0, 0.0, 0.0]);
    assert_eq!(res.populations[2], [0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn noiseless_sweeps_follow_closed_form_on_all_axes() {
    let dev = Device::default();
    let n = 4096;
    for axis in SweepAxis::ALL {
        let res = sweep_error(
            &dev,
            &NoiseModel::off(4),
            axis,
            &sweep_thetas(DEFAULT_SWEEP_POINTS),
            n,
            9,
        )
        .unwrap();
        for (p, q) in res.populations.iter().zip(res.ideal().unwrap()) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for b in 0..4 {
                assert!(
                    (p[b] - q[b]).abs() < 5.0 / (n as f64).sqrt(),
                    "{axis:?}: {p:?} vs {q:?}"
                );
            }
        }
        assert!(res.dominant_bin == 0 || res.dominant_bin == axis.flagged_bin().index());
    }
}

#[test]
fn half_pi_y_error_splits_evenly() {
    let dev = Device::default();
    let shots = run_shots(
        &dev,
        &NoiseModel::off(4),
        &ErrorSpec::y(FRAC_PI_2),
        100_000,
        None,
        21,
        0,
    )
    .unwrap();
    let p = bin_syndromes(&shots, &NoiseModel::off(4).readout).unwrap();
    assert!(
        (p[0] - 0.5).abs() < 0.005 && (p[3] - 0.5).abs() < 0.005,
        "{p:?}"
    );
    assert!(p[1] < 0.005 && p[2] < 0.005);
}

#[test]
fn constructed_even_split() {
    let readout = NoiseModel::off(4).readout;
    let shot = |m2: f64, m4: f64| ShotRecord {
        values: [-1.0, m2, -1.0, m4],
        setting: 0,
        point: 0,
    };
    let shots: Vec<_> = (0..10)
        .map(|i| {
            if i % 2 == 0 {
                shot(-1.0, -1.0)
            } else {
                shot(1.0, 1.0)
            }
        })
        .collect();
    assert_eq!(
        bin_syndromes(&shots, &readout).unwrap(),
        [0.5, 0.0, 0.0, 0.5]
    );
    assert!(bin_syndromes(&[], &readout).is_err());
}

#[test]
fn measured_noise_y_sweep() {
    let dev = Device::default();
    let noise = NoiseModel::measured(&dev).unwrap();
    let res = sweep_error(
        &dev,
        &noise,
        SweepAxis::Y,
        &sweep_thetas(DEFAULT_SWEEP_POINTS),
        10_000,
        1,
    )
    .unwrap();
    assert!(
        (0.45..=0.75).contains(&res.contrast),
        "contrast {}",
        res.contrast
    );
    assert_eq!(res.dominant_bin, 0);
    // Peak of the no-error bin at theta = 0.
    let p0 = res.populations[10][0];
    assert!((0.60..=0.80).contains(&p0), "p00 at zero {p0}");
    for p in &res.populations {
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn renormalization_maps_zero_angle_to_no_error() {
    let dev = Device::default();
    let noise = NoiseModel::measured(&dev).unwrap();
    let sweeps: Vec<_> = SweepAxis::ALL
        .iter()
        .map(|&a| {
            sweep_error(
                &dev,
                &noise,
                a,
                &sweep_thetas(DEFAULT_SWEEP_POINTS),
                10_000,
                5,
            )
            .unwrap()
        })
        .collect();
    let cal = PanelCalibration::from_sweeps(&sweeps).unwrap();
    for s in &sweeps {
        let zero = cal.apply(&s.populations[10]);
        let b = s.axis.flagged_bin().index();
        assert!((zero[0] - 1.0).abs() < 0.1, "{:?}: {zero:?}", s.axis);
        assert!(zero[b].abs() < 0.1, "{:?}: {zero:?}", s.axis);
        // Bin 00 shares one floor across axes, so the flipped end is looser.
        let flipped = cal.apply(&s.populations[20]);
        assert!(
            (flipped[b] - 1.0).abs() < 0.1 && flipped[0].abs() < 0.15,
            "{:?}: {flipped:?}",
            s.axis
        );
    }
    let panel =
        arbitrary_error_panel(&dev, &noise, &standard_panel(), 10_000, Some(&cal), 6).unwrap();
    // Renormalization helps on the panel as a whole, not necessarily per entry.
    let (mut raw_err, mut cal_err) = (0.0, 0.0);
    for e in &panel {
        let c = e.calibrated.unwrap();
        raw_err += (0..4).map(|b| (e.raw[b] - e.ideal[b]).abs()).sum::<f64>();
        cal_err += (0..4).map(|b| (c[b] - e.ideal[b]).abs()).sum::<f64>();
    }
    assert!(cal_err < 0.75 * raw_err, "{cal_err} vs {raw_err}");
}

#[test]
fn prep_error_is_projected_out_by_post_selection() {
    let dev = Device::default();
    let circuit = detection_circuit(&dev, &prep_error(FRAC_PI_4), None).unwrap();
    let out = circuit
        .run_density(&DensityMatrix::zero(4).unwrap())
        .unwrap();
    let cond = condition_on_syndromes(&out).unwrap();
    assert!((cond[0].probability - 0.5).abs() < 1e-12);
    let rho = cond[0].code_state.as_ref().unwrap();
    let psi: &StateVector = &target_state(Syndrome::new(false, false));
    let f = rho.expectation(&psi.to_density().matrix().clone());
    assert!((f - 1.0).abs() < 1e-6, "{f}");
    let noisy = apply_noisy_circuit(
        &circuit,
        &NoiseModel::off(4),
        &DensityMatrix::zero(4).unwrap(),
    )
    .unwrap();
    assert!(linalg::max_abs(&(noisy.matrix() - out.matrix())) < 1e-12);
}

#[test]
fn robustness_tracks_cos_squared_and_refuses_full_flip() {
    let dev = Device::default();
    let opts = DetectionOptions {
        shots_per_setting: 2000,
        calibration_shots: 200,
        ..Default::default()
    };
    let thetas = [0.0, 0.3, FRAC_PI_4, FRAC_PI_2];
    let pts = state_prep_robustness(&dev, &NoiseModel::off(4), &thetas, &opts, 4).unwrap();
    let n = (36 * 2000) as f64;
    for p in &pts[..3] {
        let sigma = (p.predicted_fraction * (1.0 - p.predicted_fraction) / n).sqrt();
        assert!(
            (p.fraction_00 - p.predicted_fraction).abs() <= 5.0 * sigma + 1e-12,
            "{p:?}"
        );
        assert!(p.fidelity.unwrap() > 0.98, "{p:?}");
        assert!(p.refusal.is_none());
    }
    let last = &pts[3];
    assert_eq!(last.shots_00, 0);
    assert!(last.fidelity.is_none() && last.dense_fidelity.is_none());
    assert!(last
        .refusal
        .as_deref()
        .unwrap()
        .contains("insufficient statistics"));
}
