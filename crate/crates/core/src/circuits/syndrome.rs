//! Syndrome bins and the symbolic error-to-syndrome map.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gate::{Q1, Q2, Q3, Q4};
use crate::kernel::{propagate, CliffordGate, Pauli, PauliString};
use crate::{Error, Result};

/// Joint outcome of the two syndrome measurements.
///
/// `z_flip` is the Q2 (`ZZ` check) result, `x_flip` the Q4 (`XX` check)
/// result. Q4 reading 0 is labelled `+` because it is measured after a Hadamard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syndrome {
    pub z_flip: bool,
    pub x_flip: bool,
}

impl Syndrome {
    /// Bins in the fixed reporting order `00, 10, 01, 11` = `0+, 1+, 0-, 1-`.
    pub const ALL: [Syndrome; 4] = [
        Syndrome::new(false, false),
        Syndrome::new(true, false),
        Syndrome::new(false, true),
        Syndrome::new(true, true),
    ];

    pub const fn new(z_flip: bool, x_flip: bool) -> Self {
        Self { z_flip, x_flip }
    }

    pub fn from_bits(m2: u8, m4: u8) -> Self {
        Self::new(m2 != 0, m4 != 0)
    }

    /// Position in [`Syndrome::ALL`].
    pub fn index(self) -> usize {
        usize::from(self.z_flip) + 2 * usize::from(self.x_flip)
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i & 3]
    }

    /// `"00"`, `"10"`, `"01"` or `"11"` (M2 then M4).
    pub fn bits(self) -> &'static str {
        ["00", "10", "01", "11"][self.index()]
    }

    /// `"0+"`, `"1+"`, `"0-"` or `"1-"`.
    pub fn label(self) -> &'static str {
        ["0+", "1+", "0-", "1-"][self.index()]
    }

    /// Single-qubit Pauli class that produces this syndrome.
    pub fn error_class(self) -> Pauli {
        [Pauli::I, Pauli::X, Pauli::Z, Pauli::Y][self.index()]
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Syndrome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Syndrome::ALL
            .into_iter()
            .find(|b| b.label() == s || b.bits() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown syndrome bin `{s}`")))
    }
}

/// Gates after the error slot that touch the code qubits, in circuit order:
/// the `ZZ` check CNOT into Q2, the two `XX` check CNOTs out of Q4, and the
/// Hadamard on Q4.
pub fn encoding_tail() -> Vec<CliffordGate> {
    vec![
        CliffordGate::Cnot {
            control: Q1,
            target: Q2,
        },
        CliffordGate::Cnot {
            control: Q4,
            target: Q1,
        },
        CliffordGate::Cnot {
            control: Q4,
            target: Q3,
        },
        CliffordGate::H(Q4),
    ]
}

/// Propagate a four-qubit Pauli error through the encoding tail.
pub fn propagate_error(error: &PauliString) -> Result<PauliString> {
    propagate(error, &encoding_tail())
}

/// Syndrome produced by a single-qubit Pauli error on Q1.
///
/// Obtained by propagating the error to the measurement point: an `X` or `Y`
/// component on a syndrome qubit flips its Z-basis readout.
pub fn syndrome_map(error: &PauliString) -> Result<Syndrome> {
    if error.n_qubits() != 1 {
        return Err(Error::InvalidArgument(format!(
            "syndrome_map takes a single-qubit Pauli, got {error}"
        )));
    }
    let mut full = PauliString::identity(4);
    full = full.multiply(&PauliString::single(4, Q1, error.letters()[0])?)?;
    let out = propagate_error(&full)?;
    let flips = |q: usize| out.letters()[q].bits().0;
    Ok(Syndrome::new(flips(Q2), flips(Q4)))
}

/// Closed-form syndrome distribution for `exp(-i theta/2 n.sigma)` on Q1,
/// ordered as [`Syndrome::ALL`].
///
/// The `X` component drives `10`, `Z` drives `01` and `Y` drives `11`.
pub fn ideal_syndrome_probs(axis: [f64; 3], theta: f64) -> Result<[f64; 4]> {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("axis {axis:?} is not unit")));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let [nx, ny, nz] = axis;
    Ok([c * c, s * s * nx * nx, s * s * nz * nz, s * s * ny * ny])
}
