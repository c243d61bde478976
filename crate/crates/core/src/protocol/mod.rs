//! The error-detection experiment: shots, syndrome bins, sweeps and panels.

mod experiment;
mod fit;
mod panel;
mod robustness;
mod shots;
mod sweep;

pub use experiment::{
    calibrate, readout_calibration, run_detection, shots_to_csv, tomography_shots, BinReport,
    DetectionOptions, DetectionRun, Histogram2d, ReadoutEstimate,
};
pub use fit::{fit_cosine, CosineFit};
pub use panel::{
    arbitrary_error_panel, ideal_panel_probs, standard_panel, PanelCalibration, PanelEntry,
    MIN_CALIBRATION_CONTRAST,
};
pub use robustness::{prep_error, state_prep_robustness, RobustnessPoint};
pub use shots::{
    bin_counts, bin_syndromes, outcome_probabilities, run_shots, sample_shots, ShotRecord,
};
pub use sweep::{sweep_error, sweep_thetas, SweepAxis, SweepResult, DEFAULT_SWEEP_POINTS};
