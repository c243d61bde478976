use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sublattice::protocol::SweepAxis;

#[derive(Debug, Parser)]
#[command(
    name = "sublattice",
    version,
    about = "Simulate error detection on a four-qubit sublattice"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Shots per point, setting or basis state, depending on the command.
    #[arg(long, global = true)]
    pub shots: Option<usize>,
    /// `off`, `paper` (measured device parameters) or a TOML file with a noise table.
    #[arg(long, global = true)]
    pub noise: Option<String>,
    /// Same as `--noise off`.
    #[arg(long, global = true, conflicts_with = "noise")]
    pub noiseless: bool,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detection circuit with syndrome-conditioned tomography.
    Detect(DetectArgs),
    /// Sweep an error angle about one axis and fit the bin populations.
    Sweep(SweepArgs),
    /// Bin populations for a list of arbitrary errors.
    Panel(PanelArgs),
    /// Two-qubit randomized benchmarking on native pairs.
    Rb(RbArgs),
    /// Estimate readout thresholds and assignment fidelities.
    CalibrateReadout,
    /// Preparation-error sweep with tomography of the 00 bin.
    Robustness(RobustnessArgs),
    /// Re-run a manifest and compare output hashes.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Error on Q1, e.g. `none`, `X`, `Y90`, `X60Y120`, `R`, `H`.
    #[arg(long)]
    pub error: Option<String>,
    /// Bootstrap resamples for fidelity variances.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    /// Readout calibration shots per basis state.
    #[arg(long)]
    pub calibration_shots: Option<usize>,
    /// Bins per axis of the M2/M4 readout histogram.
    #[arg(long)]
    pub histogram_bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_axis)]
    pub axis: Option<SweepAxis>,
    /// Number of angles in [-pi, pi].
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PanelArgs {
    /// Comma-separated error list.
    #[arg(long, value_delimiter = ',')]
    pub errors: Option<Vec<String>>,
    /// Closed-form probabilities only.
    #[arg(long)]
    pub ideal: bool,
    /// Skip the calibration sweeps and report raw populations only.
    #[arg(long)]
    pub no_renormalize: bool,
}

#[derive(Debug, Args)]
pub struct RbArgs {
    /// Native pairs such as `0-1,3-0`; all pairs by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    pub pairs: Option<Vec<[usize; 2]>>,
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    #[arg(long)]
    pub sequences: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RobustnessArgs {
    /// Comma-separated preparation-error angles in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thetas: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse().map_err(|e: sublattice::Error| e.to_string())
}

fn parse_pair(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("pair `{s}` is not of the form C-T"))?;
    let p = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|e| format!("pair `{s}`: {e}"))
    };
    Ok([p(a)?, p(b)?])
}
