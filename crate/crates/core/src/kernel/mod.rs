//! Dense linear algebra for states of up to four qubits.

pub mod channel;
pub mod linalg;
pub mod pauli;
pub mod state;

pub use channel::{apply_channel, KrausChannel};
pub use linalg::{CMatrix, C64};
pub use pauli::{pauli_conjugate, propagate, CliffordGate, Pauli, PauliString};
pub use state::{
    measure_qubit, partial_trace, state_fidelity, DensityMatrix, Measurement, QuantumState,
    StateVector, UnitaryMatrix,
};
