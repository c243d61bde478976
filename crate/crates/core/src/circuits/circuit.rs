use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::gate::{GateKind, GateOp};
use crate::kernel::linalg::{self, CMatrix};
use crate::kernel::{DensityMatrix, QuantumState, StateVector, UnitaryMatrix};
use crate::{Error, Result};

/// Ordered list of operations.
///
/// Operations between two `Barrier`s form one layer that runs in parallel; the
/// barrier's duration is the layer's wall-clock span. Operations after the last
/// barrier run one after another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    n_qubits: usize,
    ops: Vec<GateOp>,
}

/// One schedulable step: operations and the time they take.
#[derive(Debug, Clone, Copy)]
pub struct Layer<'a> {
    pub ops: &'a [GateOp],
    pub duration_ns: f64,
}

impl Circuit {
    pub fn new(name: impl Into<String>, n_qubits: usize) -> Self {
        Self {
            name: name.into(),
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        for &q in &op.qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange(q));
            }
        }
        if !(op.duration_ns >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "negative duration {}",
                op.duration_ns
            )));
        }
        self.ops.push(op);
        Ok(())
    }

    /// Push `ops` as one parallel layer closed by a barrier over every qubit.
    pub fn push_layer(&mut self, ops: Vec<GateOp>) -> Result<()> {
        if ops.is_empty() {
            return Ok(());
        }
        let mut touched = Vec::new();
        for op in &ops {
            for &q in &op.qubits {
                if touched.contains(&q) {
                    return Err(Error::RepeatedTarget(q));
                }
                touched.push(q);
            }
        }
        let span = ops.iter().map(|o| o.duration_ns).fold(0.0, f64::max);
        for op in ops {
            self.push(op)?;
        }
        self.push(GateOp::barrier((0..self.n_qubits).collect(), span))
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        Ok(())
    }

    pub fn layers(&self) -> Vec<Layer<'_>> {
        let mut layers = Vec::new();
        let mut start = 0;
        for (i, op) in self.ops.iter().enumerate() {
            if op.kind == GateKind::Barrier {
                layers.push(Layer {
                    ops: &self.ops[start..i],
                    duration_ns: op.duration_ns,
                });
                start = i + 1;
            }
        }
        for i in start..self.ops.len() {
            layers.push(Layer {
                ops: &self.ops[i..=i],
                duration_ns: self.ops[i].duration_ns,
            });
        }
        layers
    }

    pub fn total_duration_ns(&self) -> f64 {
        self.layers().iter().map(|l| l.duration_ns).sum()
    }

    pub fn count(&self, pred: impl Fn(&GateOp) -> bool) -> usize {
        self.ops.iter().filter(|op| pred(op)).count()
    }

    /// Number of ECR gates, one per synthesized CNOT.
    pub fn ecr_count(&self) -> usize {
        self.count(|op| op.kind == GateKind::Ecr)
    }

    /// Copy with measurements removed.
    pub fn without_measurements(&self) -> Circuit {
        Circuit {
            name: self.name.clone(),
            n_qubits: self.n_qubits,
            ops: self
                .ops
                .iter()
                .filter(|op| !matches!(op.kind, GateKind::Measure { .. }))
                .cloned()
                .collect(),
        }
    }

    /// Composite unitary of all gates. Fails if the circuit measures.
    pub fn unitary(&self) -> Result<UnitaryMatrix> {
        let dim = linalg::dim_of(self.n_qubits);
        let mut total = linalg::identity(dim);
        for op in &self.ops {
            if let GateKind::Measure { .. } = op.kind {
                return Err(Error::InvalidArgument(
                    "circuit contains measurements".into(),
                ));
            }
            if let Some(local) = op.local_unitary() {
                total = linalg::embed(&local, &op.qubits, self.n_qubits)? * total;
            }
        }
        UnitaryMatrix::new(total)
    }

    /// Noiseless evolution of a pure state, ignoring measurements.
    pub fn run_pure(&self, state: &StateVector) -> Result<StateVector> {
        self.apply_gates(state)
    }

    /// Noiseless evolution of a density matrix, ignoring measurements.
    pub fn run_density(&self, state: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply_gates(state)
    }

    fn apply_gates<S: QuantumState + Clone>(&self, state: &S) -> Result<S> {
        let mut s = state.clone();
        for op in &self.ops {
            if let Some(local) = op.local_unitary() {
                s = s.apply_unitary(&UnitaryMatrix::new(local)?, &op.qubits)?;
            }
        }
        Ok(s)
    }

    /// Qubits measured by the circuit with their readout channel.
    pub fn measurements(&self) -> Vec<(usize, usize)> {
        self.ops
            .iter()
            .filter_map(|op| match op.kind {
                GateKind::Measure { channel } => Some((op.qubits[0], channel)),
                _ => None,
            })
            .collect()
    }

    /// Line-oriented text form: a `CIRCUIT name n_qubits` header, then one
    /// `GATE qubits axis theta duration_ns` line per operation.
    pub fn to_text(&self) -> Result<String> {
        if self.name.is_empty() || self.name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "circuit name `{}` must be non-empty without whitespace",
                self.name
            )));
        }
        let mut out = String::new();
        writeln!(out, "CIRCUIT {} {}", self.name, self.n_qubits).unwrap();
        for op in &self.ops {
            let qubits = join(op.qubits.iter());
            let (gate, axis, theta) = match &op.kind {
                GateKind::Rotation { axis, angle } => ("ROT", join(axis.iter()), angle.to_string()),
                GateKind::Hadamard => ("H", "-".into(), "-".into()),
                GateKind::Ecr => ("ECR", "-".into(), "-".into()),
                GateKind::Measure { channel } => ("MEASURE", format!("ch{channel}"), "-".into()),
                GateKind::Barrier => ("BARRIER", "-".into(), "-".into()),
            };
            writeln!(out, "{gate} {qubits} {axis} {theta} {}", op.duration_ns).unwrap();
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let mut circuit = match parts.as_slice() {
            ["CIRCUIT", name, n] => Circuit::new(*name, parse_num(n, 1)?),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "expected `CIRCUIT name n_qubits`".into(),
                })
            }
        };
        for (idx, line) in lines {
            let lineno = idx + 1;
            let err = |msg: String| Error::Parse { line: lineno, msg };
            let f: Vec<&str> = line.split_whitespace().collect();
            let [gate, qubits, axis, theta, duration] = f.as_slice() else {
                return Err(err(format!("expected 5 fields, found {}", f.len())));
            };
            let qubits: Vec<usize> = qubits
                .split(',')
                .map(|q| parse_num(q, lineno))
                .collect::<Result<_>>()?;
            let duration_ns: f64 = parse_num(duration, lineno)?;
            let kind = match *gate {
                "ROT" => {
                    let a: Vec<f64> = axis
                        .split(',')
                        .map(|v| parse_num(v, lineno))
                        .collect::<Result<_>>()?;
                    let [x, y, z] = a.as_slice() else {
                        return Err(err("rotation axis needs three components".into()));
                    };
                    let op = GateOp::rotation(
                        qubits[0],
                        [*x, *y, *z],
                        parse_num(theta, lineno)?,
                        duration_ns,
                    )
                    .map_err(|e| err(e.to_string()))?;
                    op.kind
                }
                "H" => GateKind::Hadamard,
                "ECR" => GateKind::Ecr,
                "MEASURE" => {
                    let ch = axis
                        .strip_prefix("ch")
                        .ok_or_else(|| err(format!("bad channel `{axis}`")))?;
                    GateKind::Measure {
                        channel: parse_num(ch, lineno)?,
                    }
                }
                "BARRIER" => GateKind::Barrier,
                other => return Err(err(format!("unknown gate `{other}`"))),
            };
            let arity_ok = match kind {
                GateKind::Ecr => qubits.len() == 2,
                GateKind::Barrier => !qubits.is_empty(),
                _ => qubits.len() == 1,
            };
            if !arity_ok {
                return Err(err(format!("wrong qubit count for {gate}")));
            }
            circuit
                .push(GateOp {
                    kind,
                    qubits,
                    duration_ns,
                })
                .map_err(|e| err(e.to_string()))?;
        }
        Ok(circuit)
    }
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse `{s}`"),
    })
}

/// Composite unitary of `ops` acting on `n_qubits`, first op applied first.
pub fn ops_unitary(ops: &[GateOp], n_qubits: usize) -> Result<CMatrix> {
    let mut total = linalg::identity(linalg::dim_of(n_qubits));
    for op in ops {
        if let Some(local) = op.local_unitary() {
            total = linalg::embed(&local, &op.qubits, n_qubits)? * total;
        }
    }
    Ok(total)
}
