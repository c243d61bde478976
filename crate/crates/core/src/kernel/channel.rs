use super::linalg::{self, c, CMatrix, ZERO};
use super::state::DensityMatrix;
use crate::{Error, Result};

const TP_TOL: f64 = 1e-9;

/// Trace-preserving CPTP map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    /// Rejects operator sets with mismatched shapes or `sum K^dag K != I`.
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?;
        let dim = first.nrows();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("Kraus dimension {dim}")));
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &operators {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.nrows(),
                });
            }
            sum += k.adjoint() * k;
        }
        let dev = linalg::max_abs(&(sum - linalg::identity(dim)));
        if dev > TP_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { operators })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            operators: vec![linalg::identity(linalg::dim_of(n_qubits))],
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Energy relaxation `|1> -> |0>` with probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_probability("gamma", gamma)?;
        let k0 = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), ZERO, ZERO, c((1.0 - gamma).sqrt(), 0.0)],
        );
        let k1 = CMatrix::from_row_slice(2, 2, &[ZERO, c(gamma.sqrt(), 0.0), ZERO, ZERO]);
        Self::new(vec![k0, k1])
    }

    /// Pure dephasing: off-diagonal elements scale by `1 - lambda`.
    pub fn dephasing(lambda: f64) -> Result<Self> {
        check_probability("lambda", lambda)?;
        let k0 = linalg::identity(2) * c((1.0 - lambda / 2.0).sqrt(), 0.0);
        let k1 = linalg::pauli_z() * c((lambda / 2.0).sqrt(), 0.0);
        Self::new(vec![k0, k1])
    }

    /// `rho -> (1 - lambda) rho + lambda I/d` on `n_qubits`, written with Pauli Kraus operators.
    pub fn depolarizing(n_qubits: usize, lambda: f64) -> Result<Self> {
        let d = linalg::dim_of(n_qubits) as f64;
        let d2 = d * d;
        if !(0.0..=d2 / (d2 - 1.0)).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "depolarizing lambda {lambda}"
            )));
        }
        let paulis = [
            linalg::identity(2),
            linalg::pauli_x(),
            linalg::pauli_y(),
            linalg::pauli_z(),
        ];
        let mut operators = Vec::with_capacity(d2 as usize);
        for idx in 0..(d2 as usize) {
            let mut op = CMatrix::identity(1, 1);
            for q in 0..n_qubits {
                let letter = (idx >> (2 * (n_qubits - 1 - q))) & 3;
                op = linalg::kron(&op, &paulis[letter]);
            }
            let weight = if idx == 0 {
                1.0 - lambda * (d2 - 1.0) / d2
            } else {
                lambda / d2
            };
            if weight > 0.0 {
                operators.push(op * c(weight.sqrt(), 0.0));
            }
        }
        if operators.is_empty() {
            return Err(Error::InvalidArgument(
                "degenerate depolarizing channel".into(),
            ));
        }
        Self::new(operators)
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Channel equal to applying `self` and then `next`.
    pub fn then(&self, next: &KrausChannel) -> Result<Self> {
        if self.dim() != next.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: next.dim(),
            });
        }
        let mut ops = Vec::with_capacity(self.operators.len() * next.operators.len());
        for b in &next.operators {
            for a in &self.operators {
                ops.push(b * a);
            }
        }
        Ok(Self { operators: ops })
    }

    /// Superoperator acting on row-major vectorized matrices: `vec(K rho K^dag) = (K (x) conj(K)) vec(rho)`.
    pub fn superoperator(&self) -> CMatrix {
        let dim = self.dim();
        let mut s = CMatrix::zeros(dim * dim, dim * dim);
        for k in &self.operators {
            s += linalg::kron(k, &k.map(|z| z.conj()));
        }
        s
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "{name} = {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Apply `channel` to `targets` of `dm`.
pub fn apply_channel(
    dm: &DensityMatrix,
    channel: &KrausChannel,
    targets: &[usize],
) -> Result<DensityMatrix> {
    if channel.n_qubits() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: linalg::dim_of(targets.len()),
            got: channel.dim(),
        });
    }
    let n = dm.n_qubits();
    let mut acc = CMatrix::zeros(dm.dim(), dm.dim());
    for k in channel.operators() {
        let full = linalg::embed(k, targets, n)?;
        acc += &full * dm.matrix() * full.adjoint();
    }
    let mut out = dm.clone();
    out.set_matrix(acc);
    Ok(out)
}
