//! Randomized benchmarking on one qubit or one native pair.

mod calibrate;
mod clifford;
mod fit;
mod ptm;
mod run;
mod sequence;

pub use calibrate::{
    calibrate_ecr_depolarizing, calibrate_single_qubit_depolarizing, clifford_profile,
    entanglement_fidelity, infidelity_from_entanglement, profile_error, PairCalibration,
    MEASURED_CLIFFORD_ERRORS, MEASURED_SINGLE_QUBIT_ERROR,
};
pub use clifford::{
    clifford_group, sample_clifford, word_unitary, CliffordElement, CliffordGroup, Tableau,
};
pub use fit::{error_per_clifford, fit_decay, DecayFit};
pub use run::{run_pair_rb, run_rb, RbDecay, RbSample};
pub use sequence::{build_rb_sequence, clifford_layers, mean_ecr_count, RbSequence};
