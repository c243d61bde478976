use std::fmt::Write;

use serde::Serialize;
use sublattice::circuits::{Device, ErrorSpec, Syndrome};
use sublattice::protocol::{
    arbitrary_error_panel, ideal_panel_probs, readout_calibration, run_detection, shots_to_csv,
    state_prep_robustness, sweep_error, sweep_thetas, DetectionOptions, Histogram2d,
    PanelCalibration, PanelEntry, SweepAxis, SweepResult,
};
use sublattice::rb::{run_pair_rb, DecayFit, MEASURED_CLIFFORD_ERRORS};
use sublattice::rng::derive_seed;
use sublattice::tomography::{MleOptions, TomographyOptions};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

pub const DETECT_SHOTS: usize = 10_000;
pub const SWEEP_SHOTS: usize = 10_000;
pub const PANEL_SHOTS: usize = 10_000;
pub const ROBUSTNESS_SHOTS: usize = 10_000;
pub const READOUT_SHOTS: usize = 19_200;

/// Output files and a short human summary.
pub struct Run {
    pub outputs: Outputs,
    pub summary: String,
}

pub fn run(command: &str, cfg: &ExperimentConfig) -> CliResult<Run> {
    match command {
        "detect" => detect(cfg),
        "sweep" => sweep(cfg),
        "panel" => panel(cfg),
        "rb" => rb(cfg),
        "calibrate-readout" => calibrate_readout(cfg),
        "robustness" => robustness(cfg),
        other => Err(CliError::Config(format!("unknown command `{other}`"))),
    }
}

fn nonzero(name: &str, n: usize) -> CliResult<usize> {
    if n == 0 {
        return Err(CliError::Config(format!("{name} must be at least 1")));
    }
    Ok(n)
}

fn fmt4(p: &[f64; 4]) -> String {
    format!("{:.12},{:.12},{:.12},{:.12}", p[0], p[1], p[2], p[3])
}

fn detect(cfg: &ExperimentConfig) -> CliResult<Run> {
    let dev = Device::default();
    let noise = cfg.noise.build(&dev)?;
    let error: ErrorSpec = cfg.detect.error.parse()?;
    let opts = DetectionOptions {
        shots_per_setting: cfg.shots_or(DETECT_SHOTS)?,
        calibration_shots: nonzero("calibration_shots", cfg.detect.calibration_shots)?,
        tomography: TomographyOptions {
            min_bin_shots: cfg.detect.min_bin_shots,
            mle: MleOptions::default(),
            bootstrap_resamples: cfg.detect.bootstrap,
        },
    };
    let run = run_detection(&dev, &noise, &error, &opts, cfg.seed)?;
    let mut out = Outputs::default();
    out.csv(
        "shots.csv",
        shots_to_csv(&run.shots),
        "point,setting,m1,m2,m3,m4",
    );
    let mut pops = String::from("bin,label,count,population\n");
    for s in Syndrome::ALL {
        let i = s.index();
        writeln!(
            pops,
            "{},{},{},{:.12}",
            s.bits(),
            s.label(),
            run.counts[i],
            run.populations[i]
        )
        .expect("string write");
    }
    out.csv("populations.csv", pops, "bin,label,count,population");
    let hist = Histogram2d::from_shots(
        &run.shots,
        nonzero("histogram_bins", cfg.detect.histogram_bins)?,
    )?;
    out.csv("histogram.csv", hist.to_csv(), "m2_lo,m4_lo,count");
    out.json("tomography.json", &run)?;
    let mut summary = format!(
        "error {}: populations {}",
        run.error,
        fmt4(&run.populations)
    );
    for b in &run.bins {
        match &b.result {
            Some(r) => write!(
                summary,
                "\nbin {}: fidelity {:.4} ({} shots)",
                b.bin, r.fidelity, b.shots
            ),
            None => write!(summary, "\nbin {}: refused ({} shots)", b.bin, b.shots),
        }
        .expect("string write");
    }
    Ok(Run {
        outputs: out,
        summary,
    })
}

fn sweep_summary(s: &SweepResult) -> String {
    format!(
        "{:?} sweep: contrast {:.4} (bin {})",
        s.axis,
        s.contrast,
        Syndrome::from_index(s.dominant_bin).bits()
    )
}

fn sweep(cfg: &ExperimentConfig) -> CliResult<Run> {
    let dev = Device::default();
    let noise = cfg.noise.build(&dev)?;
    let thetas = sweep_thetas(cfg.sweep.points);
    let res = sweep_error(
        &dev,
        &noise,
        cfg.sweep.axis,
        &thetas,
        cfg.shots_or(SWEEP_SHOTS)?,
        cfg.seed,
    )?;
    let mut out = Outputs::default();
    out.csv(
        "sweep.csv",
        res.to_csv(),
        "theta,p00,p10,p01,p11,n_shots,seed",
    );
    out.json("sweep.json", &res)?;
    Ok(Run {
        summary: sweep_summary(&res),
        outputs: out,
    })
}

#[derive(Serialize)]
struct PanelReport<'a> {
    calibration: Option<PanelCalibration>,
    entries: &'a [PanelEntry],
}

fn panel(cfg: &ExperimentConfig) -> CliResult<Run> {
    let errors: Vec<ErrorSpec> = cfg
        .panel
        .errors
        .iter()
        .map(|e| e.parse())
        .collect::<Result<_, _>>()?;
    let mut out = Outputs::default();
    let mut csv = String::from("error,kind,p00,p10,p01,p11\n");
    if cfg.panel.ideal {
        let mut entries = Vec::new();
        for e in &errors {
            let p = ideal_panel_probs(e)?;
            writeln!(csv, "{e},ideal,{}", fmt4(&p)).expect("string write");
            entries.push((e.to_string(), p));
        }
        out.csv("panel.csv", csv, "error,kind,p00,p10,p01,p11");
        out.json("panel.json", &entries)?;
        return Ok(Run {
            summary: format!("{} ideal entries", errors.len()),
            outputs: out,
        });
    }
    let dev = Device::default();
    let noise = cfg.noise.build(&dev)?;
    let shots = cfg.shots_or(PANEL_SHOTS)?;
    let calibration = if cfg.panel.renormalize {
        let thetas = sweep_thetas(cfg.sweep.points);
        let sweeps = SweepAxis::ALL
            .iter()
            .enumerate()
            .map(|(k, &axis)| {
                sweep_error(
                    &dev,
                    &noise,
                    axis,
                    &thetas,
                    shots,
                    derive_seed(cfg.seed, &[k as u64 + 1]),
                )
            })
            .collect::<sublattice::Result<Vec<_>>>()?;
        for s in &sweeps {
            out.csv(
                &format!("calibration_{:?}.csv", s.axis).to_lowercase(),
                s.to_csv(),
                "theta,p00,p10,p01,p11,n_shots,seed",
            );
        }
        Some(PanelCalibration::from_sweeps(&sweeps)?)
    } else {
        None
    };
    let entries =
        arbitrary_error_panel(&dev, &noise, &errors, shots, calibration.as_ref(), cfg.seed)?;
    for e in &entries {
        writeln!(csv, "{},raw,{}", e.error, fmt4(&e.raw)).expect("string write");
        if let Some(c) = &e.calibrated {
            writeln!(csv, "{},calibrated,{}", e.error, fmt4(c)).expect("string write");
        }
        writeln!(csv, "{},ideal,{}", e.error, fmt4(&e.ideal)).expect("string write");
    }
    out.csv("panel.csv", csv, "error,kind,p00,p10,p01,p11");
    out.json(
        "panel.json",
        &PanelReport {
            calibration,
            entries: &entries,
        },
    )?;
    Ok(Run {
        summary: format!("{} panel entries", entries.len()),
        outputs: out,
    })
}

#[derive(Serialize)]
struct RbReport {
    pair: [usize; 2],
    measured_error: Option<f64>,
    programmed_lambda: f64,
    error_per_clifford: f64,
    error_std: f64,
    fit: DecayFit,
}

fn rb(cfg: &ExperimentConfig) -> CliResult<Run> {
    let dev = Device::default();
    let noise = cfg.noise.build(&dev)?;
    let pairs: Vec<[usize; 2]> = if cfg.rb.pairs.is_empty() {
        dev.topology
            .ecr_pairs
            .iter()
            .map(|&(c, t)| [c, t])
            .collect()
    } else {
        cfg.rb.pairs.clone()
    };
    let sequences = nonzero("sequences", cfg.rb.sequences)?;
    let mut means = String::from("pair,length,mean_p0\n");
    let mut samples = String::from("pair,length,sequence,p0\n");
    let mut reports = Vec::new();
    let mut summary = String::new();
    for (i, &[c, t]) in pairs.iter().enumerate() {
        let idx = dev.topology.check_pair(c, t)?;
        let decay = run_pair_rb(
            &dev,
            &noise,
            (c, t),
            &cfg.rb.lengths,
            sequences,
            derive_seed(cfg.seed, &[i as u64]),
        )?;
        for (m, p) in decay.lengths.iter().zip(&decay.mean_p0) {
            writeln!(means, "{c}-{t},{m},{p:.12}").expect("string write");
        }
        for s in &decay.samples {
            writeln!(samples, "{c}-{t},{},{},{:.12}", s.length, s.seq_index, s.p0)
                .expect("string write");
        }
        let lambda = match &noise.depolarizing {
            Some(d) => d.ecr_lambda(c, t)?,
            None => 0.0,
        };
        writeln!(
            summary,
            "pair {c}-{t}: r = {:.4} +- {:.4}",
            decay.error_per_clifford, decay.error_std
        )
        .expect("string write");
        reports.push(RbReport {
            pair: [c, t],
            measured_error: MEASURED_CLIFFORD_ERRORS.get(idx).copied(),
            programmed_lambda: lambda,
            error_per_clifford: decay.error_per_clifford,
            error_std: decay.error_std,
            fit: decay.fit,
        });
    }
    let mut out = Outputs::default();
    out.csv("rb.csv", means, "pair,length,mean_p0");
    out.csv("rb_samples.csv", samples, "pair,length,sequence,p0");
    out.json("rb.json", &reports)?;
    Ok(Run {
        summary: summary.trim_end().to_string(),
        outputs: out,
    })
}

fn calibrate_readout(cfg: &ExperimentConfig) -> CliResult<Run> {
    let dev = Device::default();
    let noise = cfg.noise.build(&dev)?;
    let est = readout_calibration(&noise, cfg.shots_or(READOUT_SHOTS)?, cfg.seed)?;
    let mut csv = String::from("channel,configured_fidelity,threshold,fidelity,shots\n");
    let mut summary = String::new();
    for e in &est {
        writeln!(
            csv,
            "M{},{:.6},{:.12},{:.12},{}",
            e.channel + 1,
            e.configured_fidelity,
            e.threshold,
            e.fidelity,
            e.shots
        )
        .expect("string write");
        writeln!(
            summary,
            "M{}: fidelity {:.4} (configured {:.4})",
            e.channel + 1,
            e.fidelity,
            e.configured_fidelity
        )
        .expect("string write");
    }
    let mut out = Outputs::default();
    out.csv(
        "readout.csv",
        csv,
        "channel,configured_fidelity,threshold,fidelity,shots",
    );
    out.json("readout.json", &est)?;
    Ok(Run {
        summary: summary.trim_end().to_string(),
        outputs: out,
    })
}

fn robustness(cfg: &ExperimentConfig) -> CliResult<Run> {
    let dev = Device::default();
    let noise = cfg.noise.build(&dev)?;
    let opts = DetectionOptions {
        shots_per_setting: cfg.shots_or(ROBUSTNESS_SHOTS)?,
        calibration_shots: nonzero("calibration_shots", cfg.robustness.calibration_shots)?,
        tomography: TomographyOptions::default(),
    };
    let pts = state_prep_robustness(&dev, &noise, &cfg.robustness.thetas, &opts, cfg.seed)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.12}"));
    let mut csv = String::from(
        "theta,fraction_00,predicted_fraction,fidelity,dense_fidelity,shots_00,status\n",
    );
    for p in &pts {
        writeln!(
            csv,
            "{:.12},{:.12},{:.12},{},{},{},{}",
            p.theta,
            p.fraction_00,
            p.predicted_fraction,
            opt(p.fidelity),
            opt(p.dense_fidelity),
            p.shots_00,
            if p.refusal.is_some() { "refused" } else { "ok" }
        )
        .expect("string write");
    }
    let mut out = Outputs::default();
    out.csv(
        "robustness.csv",
        csv,
        "theta,fraction_00,predicted_fraction,fidelity,dense_fidelity,shots_00,status",
    );
    out.json("robustness.json", &pts)?;
    Ok(Run {
        summary: format!("{} angles", pts.len()),
        outputs: out,
    })
}
