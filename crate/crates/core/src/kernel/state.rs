use nalgebra::DVector;
use rand::Rng;

use super::linalg::{self, bit, dim_of, CMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 4;
const NORM_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

fn check_n_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "{n_qubits} qubits (supported: 1..={MAX_QUBITS})"
        )));
    }
    Ok(())
}

/// Unitary operator, checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || !matrix.nrows().is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows().next_power_of_two(),
                got: matrix.ncols(),
            });
        }
        let dev = linalg::max_abs(&(matrix.adjoint() * &matrix - linalg::identity(matrix.nrows())));
        if dev > NORM_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &UnitaryMatrix) -> Self {
        Self {
            matrix: &self.matrix * &first.matrix,
        }
    }
}

/// Pure state of 1 to 4 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_n_qubits(n_qubits)?;
        if amplitudes.len() != dim_of(n_qubits) {
            return Err(Error::DimensionMismatch {
                expected: dim_of(n_qubits),
                got: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm^2 = {norm}")));
        }
        Ok(Self {
            n_qubits,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// Normalizes `amplitudes` before validation.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(n_qubits, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_n_qubits(n_qubits)?;
        let dim = dim_of(n_qubits);
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} >= {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(n_qubits, amps)
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// Mixed state of 1 to 4 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n_qubits: usize, matrix: CMatrix) -> Result<Self> {
        let dm = Self::new_unchecked(n_qubits, matrix)?;
        dm.validate()?;
        Ok(dm)
    }

    /// Shape checks only. Used for intermediate estimates that may be unphysical.
    pub fn new_unchecked(n_qubits: usize, matrix: CMatrix) -> Result<Self> {
        check_n_qubits(n_qubits)?;
        let dim = dim_of(n_qubits);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = linalg::max_abs(&(&self.matrix - self.matrix.adjoint()));
        if herm > NORM_TOL {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace = {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("eigenvalue {min:e} < 0")));
        }
        Ok(())
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = dim_of(n_qubits);
        Self::new(n_qubits, linalg::identity(dim) / C64::new(dim as f64, 0.0))
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Ok(StateVector::zero(n_qubits)?.to_density())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.matrix).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Diagonal of the matrix: computational-basis probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.matrix
            .diagonal()
            .iter()
            .map(|z| z.re.max(0.0))
            .collect()
    }

    /// `Tr(rho O)`.
    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        linalg::trace(&(&self.matrix * observable)).re
    }

    /// Apply an arbitrary linear map `rho -> A rho A^dag` without renormalizing.
    pub(crate) fn conjugate_in_place(&mut self, full: &CMatrix) {
        self.matrix = full * &self.matrix * full.adjoint();
    }

    pub(crate) fn set_matrix(&mut self, matrix: CMatrix) {
        self.matrix = matrix;
    }

    /// Projects `qubit` onto `value` and renormalizes. Returns the outcome probability.
    pub fn project(&mut self, qubit: usize, value: usize) -> Result<f64> {
        let n = self.n_qubits;
        if qubit >= n {
            return Err(Error::QubitOutOfRange(qubit));
        }
        let p = outcome_probability(&self.probabilities(), qubit, n, value);
        if p <= 0.0 {
            return Err(Error::InvalidState(format!(
                "projection of qubit {qubit} onto {value} has zero probability"
            )));
        }
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if bit(i, qubit, n) != value || bit(j, qubit, n) != value {
                    self.matrix[(i, j)] = ZERO;
                } else {
                    self.matrix[(i, j)] /= p;
                }
            }
        }
        Ok(p)
    }
}

fn outcome_probability(probs: &[f64], qubit: usize, n: usize, value: usize) -> f64 {
    probs
        .iter()
        .enumerate()
        .filter(|(i, _)| bit(*i, qubit, n) == value)
        .map(|(_, p)| p)
        .sum()
}

/// Common surface of pure and mixed states.
pub trait QuantumState: Sized {
    fn n_qubits(&self) -> usize;

    /// Apply `u` to `targets` (first target is the most significant operator qubit).
    fn apply_unitary(&self, u: &UnitaryMatrix, targets: &[usize]) -> Result<Self>;

    /// Computational-basis outcome probabilities.
    fn basis_probabilities(&self) -> Vec<f64>;

    /// Post-measurement state for outcome `value` on `qubit`, and its probability.
    fn collapse(&self, qubit: usize, value: usize) -> Result<(Self, f64)>;
}

impl QuantumState for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_unitary(&self, u: &UnitaryMatrix, targets: &[usize]) -> Result<Self> {
        let full = linalg::embed(u.matrix(), targets, self.n_qubits)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            amplitudes: full * &self.amplitudes,
        })
    }

    fn basis_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn collapse(&self, qubit: usize, value: usize) -> Result<(Self, f64)> {
        let n = self.n_qubits;
        if qubit >= n {
            return Err(Error::QubitOutOfRange(qubit));
        }
        let p = outcome_probability(&self.basis_probabilities(), qubit, n, value);
        if p <= 0.0 {
            return Err(Error::InvalidState("zero-probability outcome".into()));
        }
        let scale = 1.0 / p.sqrt();
        let amps = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if bit(i, qubit, n) == value {
                    a * scale
                } else {
                    ZERO
                }
            })
            .collect();
        Ok((Self::new(n, amps)?, p))
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_unitary(&self, u: &UnitaryMatrix, targets: &[usize]) -> Result<Self> {
        let full = linalg::embed(u.matrix(), targets, self.n_qubits)?;
        let mut out = self.clone();
        out.conjugate_in_place(&full);
        Ok(out)
    }

    fn basis_probabilities(&self) -> Vec<f64> {
        self.probabilities()
    }

    fn collapse(&self, qubit: usize, value: usize) -> Result<(Self, f64)> {
        let mut out = self.clone();
        let p = out.project(qubit, value)?;
        Ok((out, p))
    }
}

/// Outcome of a single projective measurement.
#[derive(Debug, Clone)]
pub struct Measurement<S> {
    pub bit: u8,
    pub state: S,
    pub probability: f64,
}

/// Sample a Born-rule outcome for `qubit` and collapse onto it.
pub fn measure_qubit<S: QuantumState, R: Rng + ?Sized>(
    state: &S,
    qubit: usize,
    rng: &mut R,
) -> Result<Measurement<S>> {
    let n = state.n_qubits();
    if qubit >= n {
        return Err(Error::QubitOutOfRange(qubit));
    }
    let p1 = outcome_probability(&state.basis_probabilities(), qubit, n, 1).clamp(0.0, 1.0);
    let bit = u8::from(rng.random::<f64>() < p1);
    let (collapsed, probability) = state.collapse(qubit, bit as usize)?;
    Ok(Measurement {
        bit,
        state: collapsed,
        probability,
    })
}

/// Reduced state on `keep`, in the order given.
pub fn partial_trace(dm: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace keeps no qubits".into(),
        ));
    }
    let n = dm.n_qubits();
    linalg::check_targets(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let compose = |a: usize, e: usize| {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            idx |= ((a >> (k - 1 - pos)) & 1) << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            idx |= ((e >> (traced.len() - 1 - pos)) & 1) << (n - 1 - q);
        }
        idx
    };
    let dk = dim_of(k);
    let de = dim_of(traced.len());
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            out[(a, b)] = (0..de)
                .map(|e| dm.matrix()[(compose(a, e), compose(b, e))])
                .sum();
        }
    }
    DensityMatrix::new_unchecked(k, out)
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(ideal) noisy sqrt(ideal)))^2`.
pub fn state_fidelity(noisy: &DensityMatrix, ideal: &DensityMatrix) -> Result<f64> {
    if noisy.dim() != ideal.dim() {
        return Err(Error::DimensionMismatch {
            expected: ideal.dim(),
            got: noisy.dim(),
        });
    }
    for dm in [noisy, ideal] {
        let min = dm.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("eigenvalue {min:e} < 0")));
        }
    }
    let root = linalg::psd_sqrt(ideal.matrix());
    let inner = &root * noisy.matrix() * &root;
    let (values, _) = linalg::hermitian_eigen(&inner);
    let tr: f64 = values.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}
