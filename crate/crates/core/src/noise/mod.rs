//! Decoherence, gate depolarizing and readout error.
//!
//! Continuous relaxation is discretized at gate granularity: every layer of
//! the circuit is followed by a Kraus step for its duration.

mod decoherence;
mod model;
mod readout;

pub use decoherence::{decoherence_channel, QubitNoiseParams};
pub use model::{
    apply_noisy_circuit, infidelity_from_lambda, lambda_from_infidelity, DepolarizingParams,
    NoiseModel,
};
pub use readout::{
    assignment_fidelity, estimate_threshold, ReadoutChannel, ReadoutModel,
    MEASURED_ASSIGNMENT_FIDELITIES,
};
