//! Tomography estimators against analytic states and an independent projection.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use sublattice::circuits::{Device, ErrorSpec, Syndrome};
use sublattice::kernel::linalg::{self, c, CMatrix};
use sublattice::kernel::StateVector;
use sublattice::noise::{NoiseModel, ReadoutModel};
use sublattice::protocol::{run_shots, ShotRecord};
use sublattice::rng::stream;
use sublattice::tomography::{
    bootstrap_variance, calibrate_observables, calibration_shots, closest_physical,
    collect_conditioned, density_to_pauli, design_matrix, linear_inversion, mle_reconstruct,
    pauli_label, pauli_to_density, reconstruct_bins, target_state, MeasSetting, MleOptions,
    ObservableCalibration, TomographyOptions,
};

fn ideal_design() -> DMatrix<f64> {
    design_matrix(&ObservableCalibration::ideal().observables).unwrap()
}

/// Exact expectation values `Tr(U rho U^dag O_k)`.
fn exact_m(rho: &CMatrix) -> Vec<f64> {
    let obs = ObservableCalibration::ideal().observables;
    MeasSetting::all()
        .flat_map(|s| {
            let u = s.unitary();
            let rotated = &u * rho * u.adjoint();
            obs.iter()
                .map(move |o| (&rotated * o).trace().re)
                .collect::<Vec<_>>()
        })
        .collect()
}

fn overlap(rho: &CMatrix, psi: &StateVector) -> f64 {
    psi.to_density()
        .matrix()
        .iter()
        .zip(rho.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

#[test]
fn bell_state_pauli_vector() {
    let rho = target_state(Syndrome::new(false, false))
        .to_density()
        .matrix()
        .clone();
    let li = linear_inversion(&exact_m(&rho), &ideal_design()).unwrap();
    for (j, x) in li.pauli_vector.iter().enumerate() {
        let want = match pauli_label(j).as_str() {
            "II" | "XX" | "ZZ" => 0.25,
            "YY" => -0.25,
            _ => 0.0,
        };
        assert!((x - want).abs() < 1e-10, "{}: {x}", pauli_label(j));
    }
    assert!(li.residual < 1e-10);
    assert_eq!(li.physicality(), 0.0);
    let mixed = &rho * c(0.9, 0.0) + linalg::identity(4) * c(0.025, 0.0);
    let design = ideal_design();
    let r = sublattice::tomography::reconstruct(
        &sublattice::tomography::MeasurementVector {
            syndrome: Syndrome::ALL[0],
            values: exact_m(&mixed),
            variances: vec![1e-4; 108],
            counts: vec![1000; 108],
        },
        &design,
        &MleOptions::default(),
    )
    .unwrap();
    assert_eq!(r.physicality, 0.0);
    assert!((r.fidelity - r.linear_fidelity).abs() < 1e-8);
}

#[test]
fn maximally_mixed_state() {
    let rho = linalg::identity(4) * c(0.25, 0.0);
    let li = linear_inversion(&exact_m(&rho), &ideal_design()).unwrap();
    assert_eq!(li.pauli_vector[0], 0.25);
    assert!(li.pauli_vector[1..].iter().all(|x| x.abs() < 1e-12));
}

#[test]
fn mle_of_exact_pure_data_is_linear_inversion() {
    let psi = target_state(Syndrome::new(true, true));
    let m = exact_m(psi.to_density().matrix());
    let design = ideal_design();
    let li = linear_inversion(&m, &design).unwrap();
    let mle = mle_reconstruct(&m, &vec![1e-4; 108], &design, &MleOptions::default()).unwrap();
    assert!(mle.converged);
    for (a, b) in li.pauli_vector.iter().zip(&mle.pauli_vector) {
        assert!((a - b).abs() < 1e-8);
    }
    assert!(overlap(&mle.density().unwrap().into_matrix(), &psi) > 1.0 - 1e-6);
}

#[test]
fn mle_beats_truncated_linear_inversion_on_unphysical_data() {
    // Pure truth plus shot-like Gaussian noise at a level where linear
    // inversion comes out with negative eigenvalues of a few percent.
    let psi = target_state(Syndrome::new(false, false));
    let design = ideal_design();
    let exact = exact_m(psi.to_density().matrix());
    let n = 300.0;
    let var: Vec<f64> = exact
        .iter()
        .map(|m| ((1.0 - m * m) / n).max(1.0 / (n * n)))
        .collect();
    let mut most_negative: f64 = 0.0;
    for seed in 0..20 {
        let mut rng = stream(seed, &[]);
        let m: Vec<f64> = exact
            .iter()
            .zip(&var)
            .map(|(m, v)| m + v.sqrt() * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let li = linear_inversion(&m, &design).unwrap();
        most_negative = most_negative.min(linalg::hermitian_eigen(&li.density()).0[3]);
        let projected = closest_physical(&li.density()).unwrap();
        let mle = mle_reconstruct(&m, &var, &design, &MleOptions::default()).unwrap();
        assert!(mle.converged);
        assert!(mle.objective <= mle.start_objective);
        let est = mle.density().unwrap();
        assert!(est.min_eigenvalue() > -1e-9);
        assert!((est.trace() - 1.0).abs() < 1e-12);
        assert!(
            overlap(est.matrix(), &psi) >= overlap(projected.matrix(), &psi) - 1e-6,
            "seed {seed}"
        );
    }
    assert!(most_negative < -0.04, "{most_negative}");
}

/// Dykstra alternating projections between the PSD cone and the trace-one
/// plane, an independent route to the nearest physical state.
fn dykstra(rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let mut x = rho.clone();
    let mut p = CMatrix::zeros(d, d);
    let mut q = CMatrix::zeros(d, d);
    for _ in 0..20_000 {
        let (vals, vecs) = linalg::hermitian_eigen(&(&x + &p));
        let y = linalg::from_eigen(&vals.iter().map(|v| v.max(0.0)).collect::<Vec<_>>(), &vecs);
        p = &x + &p - &y;
        let z = &y + &q;
        let shift = (c(1.0, 0.0) - z.trace()) / c(d as f64, 0.0);
        let next = &z + linalg::identity(d) * shift;
        q = &z - &next;
        x = next;
    }
    x
}

#[test]
fn closest_physical_matches_alternating_projections() {
    let mut rng = stream(5, &[]);
    for _ in 0..10 {
        let mut h = CMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in i..4 {
                let v = if i == j {
                    c(rng.random::<f64>() - 0.3, 0.0)
                } else {
                    c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * c(0.4, 0.0)
                };
                h[(i, j)] = v;
                h[(j, i)] = v.conj();
            }
        }
        let tr = h.trace();
        h += linalg::identity(4) * ((c(1.0, 0.0) - tr) / c(4.0, 0.0));
        let fast = closest_physical(&h).unwrap();
        let slow = dykstra(&h);
        assert!(linalg::max_abs(&(fast.matrix() - &slow)) < 1e-6);
    }
}

fn tomography_shots(
    device: &Device,
    noise: &NoiseModel,
    error: &ErrorSpec,
    per_setting: usize,
    seed: u64,
) -> Vec<ShotRecord> {
    MeasSetting::all()
        .flat_map(|s| run_shots(device, noise, error, per_setting, Some(s), seed, 0).unwrap())
        .collect()
}

#[test]
fn noiseless_end_to_end_reconstruction() {
    let dev = Device::default();
    let noise = NoiseModel::off(4);
    let cal = ObservableCalibration::ideal();
    for (error, bin) in [("none", "00"), ("X", "10"), ("Z", "01"), ("Y", "11")] {
        let shots = tomography_shots(&dev, &noise, &error.parse().unwrap(), 10_000, 1);
        let bins = reconstruct_bins(
            &shots,
            &noise.readout,
            &cal,
            &TomographyOptions::default(),
            1,
        )
        .unwrap();
        for (s, r) in Syndrome::ALL.iter().zip(&bins) {
            if s.bits() == bin {
                let r = r.as_ref().unwrap();
                assert!(r.fidelity > 0.99, "{error}: {}", r.fidelity);
                assert!(r.physicality <= 0.0 && r.physicality > -0.01);
                assert!(r.mle_converged);
                assert_eq!(r.shots_used, 360_000);
            } else {
                assert!(r.is_err(), "{error}: bin {s} should be empty");
            }
        }
    }
}

#[test]
fn finite_shot_bell_estimate() {
    // Shots drawn from the exact outcome distribution of each setting.
    let psi = target_state(Syndrome::new(false, false));
    let readout = ReadoutModel::ideal(4);
    let mut shots = Vec::new();
    for s in MeasSetting::all() {
        let u = s.unitary();
        let rho = &u * psi.to_density().matrix() * u.adjoint();
        let probs: Vec<f64> = (0..4).map(|i| rho[(i, i)].re.max(0.0)).collect();
        let mut rng = stream(3, &[s.index() as u64]);
        for _ in 0..10_000 {
            let r: f64 = rng.random();
            let mut acc = 0.0;
            let outcome = probs.iter().position(|p| {
                acc += p;
                r < acc
            });
            let o = outcome.unwrap_or(3);
            let val = |b: usize| if b == 0 { -1.0 } else { 1.0 };
            shots.push(ShotRecord {
                values: [val(o >> 1), -1.0, val(o & 1), -1.0],
                setting: s.index(),
                point: 0,
            });
        }
    }
    let cal = ObservableCalibration::ideal();
    let design = ideal_design();
    let mv = collect_conditioned(&shots, &readout, &cal, 100)
        .unwrap()
        .remove(0)
        .unwrap();
    let li = linear_inversion(&mv.values, &design).unwrap();
    assert!(overlap(&li.density(), &psi) > 0.98);
}

#[test]
fn variances_halve_when_shots_double() {
    let dev = Device::default();
    let noise = NoiseModel::measured_coherence();
    let cal = ObservableCalibration::ideal();
    let err: ErrorSpec = "Y90".parse().unwrap();
    let mean_var = |n: usize| {
        let shots = tomography_shots(&dev, &noise, &err, n, 8);
        let mv = collect_conditioned(&shots, &noise.readout, &cal, 100)
            .unwrap()
            .remove(0)
            .unwrap();
        mv.variances.iter().sum::<f64>() / 108.0
    };
    let ratio = mean_var(4000) / mean_var(2000);
    assert!((ratio - 0.5).abs() < 0.05, "{ratio}");
}

#[test]
fn y90_splits_shots_between_two_bins() {
    let dev = Device::default();
    let noise = NoiseModel::off(4);
    let shots = tomography_shots(&dev, &noise, &"Y90".parse().unwrap(), 2000, 2);
    let bins =
        collect_conditioned(&shots, &noise.readout, &ObservableCalibration::ideal(), 1).unwrap();
    for (i, b) in bins.iter().enumerate() {
        match i {
            0 | 3 => {
                let mv = b.as_ref().unwrap();
                for u in 0..36 {
                    let frac = mv.counts[3 * u] as f64 / 2000.0;
                    assert!((frac - 0.5).abs() < 0.05, "bin {i} setting {u}: {frac}");
                }
            }
            _ => assert!(b.is_err()),
        }
    }
}

#[test]
fn bootstrap_variance_of_deterministic_shots_is_zero() {
    // Every shot of a setting is identical, so every replica rebuilds the same data.
    let readout = ReadoutModel::ideal(4);
    let shots: Vec<ShotRecord> = (0..36)
        .flat_map(|u| {
            let v = if u % 2 == 0 { -1.0 } else { 1.0 };
            (0..10).map(move |_| ShotRecord {
                values: [-1.0, -1.0, v, -1.0],
                setting: u,
                point: 0,
            })
        })
        .collect();
    let var = bootstrap_variance(
        &shots,
        &readout,
        &ObservableCalibration::ideal(),
        &ideal_design(),
        Syndrome::ALL[0],
        5,
        &TomographyOptions::default(),
        1,
    )
    .unwrap();
    assert!(var < 1e-12, "{var}");
}

#[test]
fn bootstrap_variance_scales_with_shots() {
    let dev = Device::default();
    let noise = NoiseModel::measured_coherence();
    let cal =
        calibrate_observables(&calibration_shots(&noise.readout, 19_200, 1).unwrap()).unwrap();
    let design = design_matrix(&cal.observables).unwrap();
    let opts = TomographyOptions::default();
    let var = |n: usize| {
        let mut total = 0.0;
        for seed in 0..4 {
            let shots = tomography_shots(&dev, &noise, &ErrorSpec::none(), n, 100 + seed);
            total += bootstrap_variance(
                &shots,
                &noise.readout,
                &cal,
                &design,
                Syndrome::ALL[0],
                40,
                &opts,
                seed,
            )
            .unwrap();
        }
        total / 4.0
    };
    let ratio = var(4000) / var(2000);
    assert!((0.3..0.75).contains(&ratio), "{ratio}");
}

#[test]
fn pauli_conversions_are_inverse() {
    let rho = target_state(Syndrome::new(true, false))
        .to_density()
        .matrix()
        .clone();
    let back = pauli_to_density(&density_to_pauli(&rho));
    assert!(linalg::max_abs(&(back - rho)) < 1e-14);
}
