//! Simulator for stabilizer-based error detection on a 2x2 superconducting
//! qubit sublattice.
//!
//! Two code qubits (Q1, Q3) hold a Bell pair whose `ZZ` and `XX` parities are
//! mapped onto a Z-syndrome qubit (Q2) and an X-syndrome qubit (Q4). The crate
//! builds that circuit out of echoed cross-resonance gates, runs it through a
//! density-matrix noise model, samples single-shot readout, and reconstructs
//! the syndrome-conditioned code states with tomography. Randomized
//! benchmarking is included to calibrate the gate error model.
//!
//! Qubits are indexed from zero (`0` is Q1) and qubit 0 is the most
//! significant bit of a basis-state index.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuits;
pub mod error;
pub mod kernel;
pub mod noise;
pub mod protocol;
pub mod rb;
pub mod rng;
pub mod tomography;

pub use error::{Error, Result};
