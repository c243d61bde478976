//! Command-line runner for the sublattice error-detection simulator.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::{ExperimentConfig, NoiseConfig};
use error::{CliError, CliResult};
use output::{write_outputs, Manifest};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Detect(_) => "detect",
        Command::Sweep(_) => "sweep",
        Command::Panel(_) => "panel",
        Command::Rb(_) => "rb",
        Command::CalibrateReadout => "calibrate-readout",
        Command::Robustness(_) => "robustness",
        Command::Replay(_) => "replay",
    }
}

fn resolve(cli: &Cli) -> CliResult<ExperimentConfig> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(shots) = c.shots {
        cfg.shots = Some(shots);
    }
    if let Some(out) = &c.out {
        cfg.out = Some(out.clone());
    }
    if c.noiseless {
        cfg.noise = NoiseConfig::off();
    }
    match c.noise.as_deref() {
        None => {}
        Some("off") => cfg.noise = NoiseConfig::off(),
        Some("paper") => cfg.noise = NoiseConfig::default(),
        Some(path) => cfg.noise = NoiseConfig::from_file(path.as_ref())?,
    }
    match &cli.command {
        Command::Detect(a) => {
            if let Some(e) = &a.error {
                cfg.detect.error = e.clone();
            }
            if let Some(b) = a.bootstrap {
                cfg.detect.bootstrap = b;
            }
            if let Some(n) = a.calibration_shots {
                cfg.detect.calibration_shots = n;
            }
            if let Some(n) = a.histogram_bins {
                cfg.detect.histogram_bins = n;
            }
        }
        Command::Sweep(a) => {
            if let Some(axis) = a.axis {
                cfg.sweep.axis = axis;
            }
            if let Some(p) = a.points {
                cfg.sweep.points = p;
            }
        }
        Command::Panel(a) => {
            if let Some(e) = &a.errors {
                cfg.panel.errors = e.clone();
            }
            cfg.panel.ideal |= a.ideal;
            if a.no_renormalize {
                cfg.panel.renormalize = false;
            }
        }
        Command::Rb(a) => {
            if let Some(p) = &a.pairs {
                cfg.rb.pairs = p.clone();
            }
            if let Some(l) = &a.lengths {
                cfg.rb.lengths = l.clone();
            }
            if let Some(s) = a.sequences {
                cfg.rb.sequences = s;
            }
        }
        Command::Robustness(a) => {
            if let Some(t) = &a.thetas {
                cfg.robustness.thetas = t.clone();
            }
        }
        Command::CalibrateReadout | Command::Replay(_) => {}
    }
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out
        .clone()
        .unwrap_or_else(|| PathBuf::from("sublattice-out"))
}

fn replay(manifest_path: &std::path::Path, out: Option<PathBuf>) -> CliResult<()> {
    let manifest = Manifest::load(manifest_path)?;
    let dir = out.ok_or_else(|| CliError::Config("replay needs --out".into()))?;
    let run = commands::run(&manifest.command, &manifest.config)?;
    let fresh = write_outputs(&dir, &manifest.command, &manifest.config, run.outputs)?;
    let mismatched: Vec<&str> = manifest
        .outputs
        .iter()
        .filter(|h| !fresh.outputs.contains(h))
        .map(|h| h.file.as_str())
        .collect();
    if !mismatched.is_empty() || fresh.outputs.len() != manifest.outputs.len() {
        return Err(CliError::Numerical(format!(
            "replay hashes differ: {}",
            mismatched.join(" ")
        )));
    }
    println!(
        "replay of {} matches {} files",
        manifest.command,
        fresh.outputs.len()
    );
    Ok(())
}

fn execute(cli: &Cli) -> CliResult<()> {
    if let Command::Replay(a) = &cli.command {
        return replay(&a.manifest, cli.common.out.clone());
    }
    let cfg = resolve(cli)?;
    let name = command_name(&cli.command);
    let run = commands::run(name, &cfg)?;
    let dir = out_dir(&cfg);
    let manifest = write_outputs(&dir, name, &cfg, run.outputs)?;
    println!("{}", run.summary);
    println!(
        "wrote {} files to {}",
        manifest.outputs.len() + 1,
        dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "code": e.exit_code(), "reason": e.to_string() });
            eprintln!("{line}");
            ExitCode::from(e.exit_code())
        }
    }
}
