//! Native gate set, CNOT synthesis and the error-detection circuit.

pub mod circuit;
pub mod detection;
pub mod gate;
pub mod syndrome;
pub mod synthesis;

pub use circuit::{Circuit, Layer};
pub use detection::{
    build_detection_circuit, condition_on_syndromes, detection_circuit, ConditionedState,
    ErrorElement, ErrorSpec,
};
pub use gate::{
    ecr_matrix, ecr_unitary, DeviceTopology, GateDurations, GateKind, GateOp, QubitRole, Q1, Q2,
    Q3, Q4,
};
pub use syndrome::{ideal_syndrome_probs, propagate_error, syndrome_map, Syndrome};
pub use synthesis::{cnot_from_ecr, Device};
