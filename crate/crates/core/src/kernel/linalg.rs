//! Dense complex matrix helpers shared by the rest of the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

pub fn phase_s() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, I])
}

/// CNOT with the control as the most significant qubit.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// `exp(-i theta/2 n.sigma)` for a unit axis `n`.
pub fn rotation(axis: [f64; 3], theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    let [nx, ny, nz] = axis;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(co, -s * nz),
            c(-s * ny, -s * nx),
            c(s * ny, -s * nx),
            c(co, s * nz),
        ],
    )
}

/// `exp(-i theta/2 H)` for a Hermitian `H` with eigenvalues +-1 (a Pauli product).
pub fn pauli_exponential(pauli: &CMatrix, theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    identity(pauli.nrows()) * c(co, 0.0) - pauli * c(0.0, s)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn dim_of(n_qubits: usize) -> usize {
    1usize << n_qubits
}

/// Bit of `qubit` in basis index `index`; qubit 0 is the most significant.
#[inline]
pub fn bit(index: usize, qubit: usize, n_qubits: usize) -> usize {
    (index >> (n_qubits - 1 - qubit)) & 1
}

pub(crate) fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    for (k, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitOutOfRange(t));
        }
        if targets[..k].contains(&t) {
            return Err(Error::RepeatedTarget(t));
        }
    }
    Ok(())
}

/// Lift an operator on `targets` (first target = most significant operator
/// bit) to the full `n_qubits` register.
pub fn embed(op: &CMatrix, targets: &[usize], n_qubits: usize) -> Result<CMatrix> {
    check_targets(targets, n_qubits)?;
    let k = targets.len();
    let sub = dim_of(k);
    if op.nrows() != sub || op.ncols() != sub {
        return Err(Error::DimensionMismatch {
            expected: sub,
            got: op.nrows(),
        });
    }
    let dim = dim_of(n_qubits);
    let mask: usize = targets.iter().map(|&t| 1usize << (n_qubits - 1 - t)).sum();
    let sub_index = |i: usize| {
        targets
            .iter()
            .fold(0usize, |acc, &t| (acc << 1) | bit(i, t, n_qubits))
    };
    let subs: Vec<usize> = (0..dim).map(sub_index).collect();
    let mut full = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if i & !mask == j & !mask {
                full[(i, j)] = op[(subs[i], subs[j])];
            }
        }
    }
    Ok(full)
}

/// Eigen-decomposition of the Hermitian part `(m + m^dag)/2`, eigenvalues
/// in descending order.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Rebuild `V diag(values) V^dag`.
pub fn from_eigen(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= v;
        }
    }
    &scaled * vectors.adjoint()
}

/// Principal square root of the Hermitian part, negative eigenvalues clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let roots: Vec<f64> = values.iter().map(|&v| v.max(0.0).sqrt()).collect();
    from_eigen(&roots, &vectors)
}

/// Frobenius distance between `a` and `b` after removing the best global phase.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    frobenius(&(a * phase - b))
}

/// Axis and angle of a 2x2 unitary written as `e^{i phi} exp(-i theta/2 n.sigma)`,
/// with `theta` in `[0, pi]`.
pub fn axis_angle(u: &CMatrix) -> ([f64; 3], f64) {
    // Remove the global phase so det = 1.
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let su = u * det.sqrt().inv();
    // su = a I - i (bx X + by Y + bz Z) with a, b real.
    let a = (su[(0, 0)] + su[(1, 1)]) * 0.5;
    let bz = (su[(0, 0)] - su[(1, 1)]) * c(0.0, 0.5);
    let bx = (su[(0, 1)] + su[(1, 0)]) * c(0.0, 0.5);
    let by = (su[(1, 0)] - su[(0, 1)]) * 0.5;
    let mut a = a.re;
    let mut b = [bx.re, by.re, bz.re];
    if a < 0.0 {
        a = -a;
        b = [-b[0], -b[1], -b[2]];
    }
    let s = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    let theta = 2.0 * s.atan2(a);
    if s < 1e-15 {
        ([0.0, 0.0, 1.0], 0.0)
    } else {
        ([b[0] / s, b[1] / s, b[2] / s], theta)
    }
}
