//! The 36 pre-measurement rotations.
//!
//! Rotations are `exp(-i theta/2 n.sigma)`. Setting `u = 6a + b` plays
//! rotation `a` on Q1 and rotation `b` on Q3:
//!
//! | index | rotation |
//! |-------|----------|
//! | 0     | I        |
//! | 1     | X90      |
//! | 2     | X45      |
//! | 3     | X-45     |
//! | 4     | Y45      |
//! | 5     | Y-45     |

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::circuits::{GateOp, Q1, Q3};
use crate::kernel::linalg::{self, CMatrix};
use crate::{Error, Result};

pub const N_SETTINGS: usize = 36;

const ROTATIONS: [(&str, [f64; 3], f64); 6] = [
    ("I", [1.0, 0.0, 0.0], 0.0),
    ("X90", [1.0, 0.0, 0.0], FRAC_PI_2),
    ("X45", [1.0, 0.0, 0.0], FRAC_PI_4),
    ("X-45", [1.0, 0.0, 0.0], -FRAC_PI_4),
    ("Y45", [0.0, 1.0, 0.0], FRAC_PI_4),
    ("Y-45", [0.0, 1.0, 0.0], -FRAC_PI_4),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasSetting {
    index: usize,
}

impl MeasSetting {
    pub fn new(index: usize) -> Result<Self> {
        if index >= N_SETTINGS {
            return Err(Error::InvalidArgument(format!(
                "setting {index} outside 0..{N_SETTINGS}"
            )));
        }
        Ok(Self { index })
    }

    pub fn all() -> impl Iterator<Item = MeasSetting> {
        (0..N_SETTINGS).map(|index| Self { index })
    }

    pub fn index(self) -> usize {
        self.index
    }

    /// Rotation indices on (Q1, Q3).
    pub fn rotations(self) -> (usize, usize) {
        (self.index / 6, self.index % 6)
    }

    pub fn label(self) -> String {
        let (a, b) = self.rotations();
        format!("{}/{}", ROTATIONS[a].0, ROTATIONS[b].0)
    }

    /// Two-qubit unitary `U_a (x) U_b` on the code pair.
    pub fn unitary(self) -> CMatrix {
        let (a, b) = self.rotations();
        let r = |k: usize| linalg::rotation(ROTATIONS[k].1, ROTATIONS[k].2);
        linalg::kron(&r(a), &r(b))
    }

    /// Gates on (Q1, Q3). The identity is a zero-angle slot.
    pub fn gates(self, duration_ns: f64) -> Result<[GateOp; 2]> {
        let (a, b) = self.rotations();
        let op =
            |q: usize, k: usize| GateOp::rotation(q, ROTATIONS[k].1, ROTATIONS[k].2, duration_ns);
        Ok([op(Q1, a)?, op(Q3, b)?])
    }
}
