//! Signed Pauli strings and their conjugation by Clifford gates.
//!
//! A string is `i^phase * P_0 (x) P_1 (x) ...` with qubit 0 leftmost. Phases are
//! tracked exactly, so `U P U^dag` is reproduced as a matrix identity and not
//! just up to sign.

use std::fmt;
use std::str::FromStr;

use super::linalg::{self, c, CMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => linalg::identity(2),
            Pauli::X => linalg::pauli_x(),
            Pauli::Y => linalg::pauli_y(),
            Pauli::Z => linalg::pauli_z(),
        }
    }

    /// `(x, z)` bits of the symplectic representation.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// `self * other = i^k * result`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
    /// Power of `i`, modulo 4.
    phase: u8,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, phase: u8) -> Self {
        Self {
            letters,
            phase: phase % 4,
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(vec![Pauli::I; n_qubits], 0)
    }

    /// `letter` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::QubitOutOfRange(qubit));
        }
        let mut p = Self::identity(n_qubits);
        p.letters[qubit] = letter;
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Same letters with the phase reset to `+1`.
    pub fn unsigned(&self) -> Self {
        Self::new(self.letters.clone(), 0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != rhs.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                got: rhs.n_qubits(),
            });
        }
        let mut phase = self.phase + rhs.phase;
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                phase += k;
                p
            })
            .collect();
        Ok(PauliString::new(letters, phase))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::identity(1, 1);
        for p in &self.letters {
            m = linalg::kron(&m, &p.matrix());
        }
        let phase = match self.phase {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        };
        m * phase
    }

    /// Conjugate by a map given through the images of `X_q` and `Z_q`.
    ///
    /// Each letter is factored as `X^x Z^z` (with `Y = i X Z`) and the images are
    /// multiplied in qubit order, which preserves the operator product exactly.
    pub fn conjugate_with<F>(&self, mut image: F) -> Result<PauliString>
    where
        F: FnMut(usize, Pauli) -> PauliString,
    {
        let n = self.n_qubits();
        let mut out = PauliString::identity(n).with_phase(self.phase);
        for (q, &letter) in self.letters.iter().enumerate() {
            let (x, z) = letter.bits();
            if x {
                out = out.multiply(&image(q, Pauli::X))?;
            }
            if z {
                out = out.multiply(&image(q, Pauli::Z))?;
            }
            if x && z {
                out.phase = (out.phase + 1) % 4;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{sign}")?;
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `XIZ`, `-YY`, `+iZ`, `-iXX`.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else {
            (0, s.strip_prefix('+').unwrap_or(s))
        };
        let letters = body
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidArgument(format!(
                    "bad Pauli letter `{other}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli string".into()));
        }
        Ok(PauliString::new(letters, phase))
    }
}

/// Clifford gates with symbolic Pauli propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
}

impl CliffordGate {
    /// Look up a gate by name: `H`, `S`, `CNOT`/`CX`.
    pub fn from_name(name: &str, qubits: &[usize]) -> Result<Self> {
        match (name.to_ascii_uppercase().as_str(), qubits) {
            ("H", &[q]) => Ok(CliffordGate::H(q)),
            ("S", &[q]) => Ok(CliffordGate::S(q)),
            ("CNOT" | "CX", &[control, target]) if control != target => {
                Ok(CliffordGate::Cnot { control, target })
            }
            _ => Err(Error::UnsupportedGate(format!("{name}{qubits:?}"))),
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q) | CliffordGate::S(q) => vec![q],
            CliffordGate::Cnot { control, target } => vec![control, target],
        }
    }

    /// Dense unitary on the listed qubits (control first for CNOT).
    pub fn local_matrix(&self) -> CMatrix {
        match self {
            CliffordGate::H(_) => linalg::hadamard(),
            CliffordGate::S(_) => linalg::phase_s(),
            CliffordGate::Cnot { .. } => linalg::cnot(),
        }
    }

    fn image(&self, n: usize, qubit: usize, letter: Pauli) -> PauliString {
        let mut out = PauliString::single(n, qubit, letter).expect("qubit checked by caller");
        match (*self, letter) {
            (CliffordGate::H(q), Pauli::X) if q == qubit => out.letters[q] = Pauli::Z,
            (CliffordGate::H(q), Pauli::Z) if q == qubit => out.letters[q] = Pauli::X,
            (CliffordGate::S(q), Pauli::X) if q == qubit => out.letters[q] = Pauli::Y,
            (CliffordGate::Cnot { control, target }, Pauli::X) if control == qubit => {
                out.letters[target] = Pauli::X
            }
            (CliffordGate::Cnot { control, target }, Pauli::Z) if target == qubit => {
                out.letters[control] = Pauli::Z
            }
            _ => {}
        }
        out
    }
}

/// `U p U^dag` for a Clifford gate `U`.
pub fn pauli_conjugate(p: &PauliString, gate: &CliffordGate) -> Result<PauliString> {
    let n = p.n_qubits();
    super::linalg::check_targets(&gate.qubits(), n)?;
    p.conjugate_with(|q, letter| gate.image(n, q, letter))
}

/// Conjugate through a sequence of gates applied in order.
pub fn propagate(p: &PauliString, gates: &[CliffordGate]) -> Result<PauliString> {
    gates
        .iter()
        .try_fold(p.clone(), |acc, g| pauli_conjugate(&acc, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn dense_conjugate(p: &PauliString, gate: &CliffordGate) -> CMatrix {
        let u = linalg::embed(&gate.local_matrix(), &gate.qubits(), p.n_qubits()).unwrap();
        &u * p.matrix() * u.adjoint()
    }

    #[test]
    fn multiplication_phases() {
        assert_eq!(ps("X").multiply(&ps("Y")).unwrap(), ps("+iZ"));
        assert_eq!(ps("Y").multiply(&ps("X")).unwrap(), ps("-iZ"));
        assert_eq!(ps("-iZ").multiply(&ps("X")).unwrap(), ps("Y"));
    }

    #[test]
    fn display_round_trips() {
        for s in ["+XIZ", "-YY", "+iZ", "-iXX"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn cnot_propagation_rules() {
        let g = CliffordGate::Cnot {
            control: 0,
            target: 1,
        };
        assert_eq!(pauli_conjugate(&ps("XI"), &g).unwrap(), ps("XX"));
        assert_eq!(pauli_conjugate(&ps("ZI"), &g).unwrap(), ps("ZI"));
        assert_eq!(pauli_conjugate(&ps("IZ"), &g).unwrap(), ps("ZZ"));
        assert_eq!(pauli_conjugate(&ps("YI"), &g).unwrap(), ps("YX"));
    }

    #[test]
    fn exhaustive_agreement_with_dense_conjugation() {
        let cnots = [
            CliffordGate::Cnot {
                control: 0,
                target: 1,
            },
            CliffordGate::Cnot {
                control: 1,
                target: 0,
            },
        ];
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let p = PauliString::new(vec![a, b], 0);
                for g in &cnots {
                    let sym = pauli_conjugate(&p, g).unwrap().matrix();
                    let dense = dense_conjugate(&p, g);
                    assert!(linalg::max_abs(&(sym - dense)) < 1e-12, "{p} through {g:?}");
                }
            }
        }
        for a in Pauli::ALL {
            let p = PauliString::new(vec![a], 0);
            for g in [CliffordGate::H(0), CliffordGate::S(0)] {
                let sym = pauli_conjugate(&p, &g).unwrap().matrix();
                assert!(linalg::max_abs(&(sym - dense_conjugate(&p, &g))) < 1e-12);
            }
        }
    }

    #[test]
    fn unknown_gate_rejected() {
        assert!(matches!(
            CliffordGate::from_name("T", &[0]),
            Err(Error::UnsupportedGate(_))
        ));
        assert!(CliffordGate::from_name("cx", &[0, 1]).is_ok());
        assert!(CliffordGate::from_name("CNOT", &[1, 1]).is_err());
    }

    #[test]
    fn out_of_range_gate_rejected() {
        let g = CliffordGate::Cnot {
            control: 0,
            target: 3,
        };
        assert!(pauli_conjugate(&ps("XX"), &g).is_err());
    }
}
