//! The four-qubit error-detection circuit.
//!
//! Layer order:
//! 1. `H` on Q1 and Q4 (Q4 starts in `|+>`).
//! 2. CNOT(Q1->Q2), CNOT(Q2->Q3): GHZ state on Q1..Q3. This is what remains of
//!    Bell preparation, a SWAP(Q2,Q3) and the `ZZ` check after cancelling three
//!    CNOTs against each other and against `|0>` on Q3.
//! 3. Injected error on Q1.
//! 4. CNOT(Q1->Q2): maps the `ZZ` parity of (Q1,Q3) onto Q2.
//! 5. CNOT(Q4->Q1), CNOT(Q4->Q3): `XX` parity kicked back onto Q4.
//! 6. `H` on Q4.
//! 7. Optional tomography pre-rotations on Q1 and Q3.
//! 8. Measurement of every qubit on its own readout channel.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::gate::{GateKind, GateOp, Q1, Q2, Q3, Q4};
use super::syndrome::Syndrome;
use super::synthesis::Device;
use crate::kernel::linalg::{self, CMatrix};
use crate::kernel::{partial_trace, DensityMatrix};
use crate::{Error, Result};

/// One elementary piece of an injected error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ErrorElement {
    Rotation { axis: [f64; 3], angle: f64 },
    Hadamard,
}

/// Error applied to Q1, stored in application order.
///
/// Text forms: `none`, `H`, `R` (= `Y90 X90`), products such as `X60Y120`
/// (angles in degrees, default 180, rightmost factor applied first) and
/// `axis:nx,ny,nz:theta` with `theta` in radians.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub elements: Vec<ErrorElement>,
}

impl ErrorSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("zero rotation axis".into()));
        }
        Ok(Self {
            elements: vec![ErrorElement::Rotation {
                axis: axis.map(|a| a / norm),
                angle,
            }],
        })
    }

    pub fn x(angle: f64) -> Self {
        Self::rotation([1.0, 0.0, 0.0], angle).unwrap()
    }

    pub fn y(angle: f64) -> Self {
        Self::rotation([0.0, 1.0, 0.0], angle).unwrap()
    }

    pub fn z(angle: f64) -> Self {
        Self::rotation([0.0, 0.0, 1.0], angle).unwrap()
    }

    pub fn hadamard() -> Self {
        Self {
            elements: vec![ErrorElement::Hadamard],
        }
    }

    pub fn is_none(&self) -> bool {
        self.elements.is_empty()
    }

    /// Gates on Q1, in application order.
    pub fn to_gates(&self, duration_ns: f64) -> Result<Vec<GateOp>> {
        self.elements
            .iter()
            .map(|e| match e {
                ErrorElement::Rotation { axis, angle } => {
                    GateOp::rotation(Q1, *axis, *angle, duration_ns)
                }
                ErrorElement::Hadamard => Ok(GateOp::hadamard(Q1, duration_ns)),
            })
            .collect()
    }

    /// Composite 2x2 unitary.
    pub fn unitary(&self) -> CMatrix {
        self.elements.iter().fold(linalg::identity(2), |acc, e| {
            let m = match e {
                ErrorElement::Rotation { axis, angle } => linalg::rotation(*axis, *angle),
                ErrorElement::Hadamard => linalg::hadamard(),
            };
            m * acc
        })
    }

    /// Axis and angle of the composite rotation, global phase dropped.
    pub fn axis_angle(&self) -> ([f64; 3], f64) {
        linalg::axis_angle(&self.unitary())
    }
}

fn fmt_angle(angle: f64) -> String {
    let deg = angle.to_degrees();
    if (deg - deg.round()).abs() < 1e-9 {
        format!("{}", deg.round() as i64)
    } else {
        format!("{deg}")
    }
}

impl fmt::Display for ErrorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elements.is_empty() {
            return f.write_str("none");
        }
        // Written as an operator product: last-applied factor first.
        for e in self.elements.iter().rev() {
            match e {
                ErrorElement::Hadamard => f.write_str("H")?,
                ErrorElement::Rotation { axis, angle } => match axis {
                    [1.0, 0.0, 0.0] => write!(f, "X{}", fmt_angle(*angle))?,
                    [0.0, 1.0, 0.0] => write!(f, "Y{}", fmt_angle(*angle))?,
                    [0.0, 0.0, 1.0] => write!(f, "Z{}", fmt_angle(*angle))?,
                    [x, y, z] => write!(f, "[axis:{x},{y},{z}:{angle}]")?,
                },
            }
        }
        Ok(())
    }
}

impl FromStr for ErrorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("invalid error spec `{s}`"));
        match s {
            "" | "none" | "I" | "Id" => return Ok(Self::none()),
            "H" => return Ok(Self::hadamard()),
            "R" => {
                return Ok(Self {
                    elements: vec![
                        ErrorElement::Rotation {
                            axis: [1.0, 0.0, 0.0],
                            angle: FRAC_PI_2,
                        },
                        ErrorElement::Rotation {
                            axis: [0.0, 1.0, 0.0],
                            angle: FRAC_PI_2,
                        },
                    ],
                })
            }
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("axis:") {
            let (axis, theta) = rest.rsplit_once(':').ok_or_else(bad)?;
            let comps: Vec<f64> = axis
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            let [x, y, z] = comps.as_slice() else {
                return Err(bad());
            };
            let theta: f64 = theta.trim().parse().map_err(|_| bad())?;
            return Self::rotation([*x, *y, *z], theta);
        }
        let mut factors = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(letter) = chars.next() {
            let axis = match letter {
                'X' => [1.0, 0.0, 0.0],
                'Y' => [0.0, 1.0, 0.0],
                'Z' => [0.0, 0.0, 1.0],
                _ => return Err(bad()),
            };
            let mut num = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() || c == '.' || c == '-' {
                    num.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let deg: f64 = if num.is_empty() {
                180.0
            } else {
                num.parse().map_err(|_| bad())?
            };
            factors.push(ErrorElement::Rotation {
                axis,
                angle: deg.to_radians(),
            });
        }
        factors.reverse();
        Ok(Self { elements: factors })
    }
}

/// Builds the detection circuit for `device`.
///
/// `error` must act on Q1 only and contain rotations or Hadamards.
/// `pre_rotations` are the tomography rotations for Q1 and Q3.
pub fn build_detection_circuit(
    device: &Device,
    error: &[GateOp],
    pre_rotations: Option<&[GateOp; 2]>,
    measure: bool,
) -> Result<Circuit> {
    for op in error {
        if op.qubits != [Q1] {
            return Err(Error::InvalidArgument(format!(
                "errors are injected on Q1 only, got qubits {:?}",
                op.qubits
            )));
        }
        if !matches!(op.kind, GateKind::Rotation { .. } | GateKind::Hadamard) {
            return Err(Error::InvalidArgument(format!("error gate {:?}", op.kind)));
        }
    }
    if let Some([a, b]) = pre_rotations {
        if a.qubits != [Q1] || b.qubits != [Q3] || !a.is_unitary() || !b.is_unitary() {
            return Err(Error::InvalidArgument(
                "tomography rotations must act on Q1 and Q3".into(),
            ));
        }
    }
    let one_q = device.durations.single_qubit_ns;
    let mut c = Circuit::new("detection", device.n_qubits());
    c.push_layer(vec![
        GateOp::hadamard(Q1, one_q),
        GateOp::hadamard(Q4, one_q),
    ])?;
    for (ctl, tgt) in [(Q1, Q2), (Q2, Q3)] {
        for layer in device.cnot_layers(ctl, tgt)? {
            c.push_layer(layer)?;
        }
    }
    for op in error {
        c.push_layer(vec![op.clone()])?;
    }
    for (ctl, tgt) in [(Q1, Q2), (Q4, Q1), (Q4, Q3)] {
        for layer in device.cnot_layers(ctl, tgt)? {
            c.push_layer(layer)?;
        }
    }
    c.push_layer(vec![GateOp::hadamard(Q4, one_q)])?;
    if let Some([a, b]) = pre_rotations {
        c.push_layer(vec![a.clone(), b.clone()])?;
    }
    if measure {
        for q in 0..device.n_qubits() {
            c.push(GateOp::measure(q, q))?;
        }
    }
    Ok(c)
}

/// Convenience wrapper taking an [`ErrorSpec`].
pub fn detection_circuit(
    device: &Device,
    error: &ErrorSpec,
    pre_rotations: Option<&[GateOp; 2]>,
) -> Result<Circuit> {
    let gates = error.to_gates(device.durations.single_qubit_ns)?;
    build_detection_circuit(device, &gates, pre_rotations, true)
}

/// State of the code pair (Q1, Q3) after post-selecting one syndrome.
#[derive(Debug, Clone)]
pub struct ConditionedState {
    pub syndrome: Syndrome,
    pub probability: f64,
    /// `None` when the syndrome has (numerically) zero probability.
    pub code_state: Option<DensityMatrix>,
}

/// Syndrome probabilities and conditioned code states of a pre-measurement
/// four-qubit state.
pub fn condition_on_syndromes(state: &DensityMatrix) -> Result<Vec<ConditionedState>> {
    if state.n_qubits() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            got: state.dim(),
        });
    }
    Syndrome::ALL
        .iter()
        .map(|&syndrome| {
            let mut projected = state.clone();
            let p2 = projected.project(Q2, usize::from(syndrome.z_flip));
            let p4 = p2.and_then(|p2| {
                projected
                    .project(Q4, usize::from(syndrome.x_flip))
                    .map(|p4| p2 * p4)
            });
            match p4 {
                Ok(p) if p > 1e-14 => Ok(ConditionedState {
                    syndrome,
                    probability: p,
                    code_state: Some(partial_trace(&projected, &[Q1, Q3])?),
                }),
                _ => Ok(ConditionedState {
                    syndrome,
                    probability: 0.0,
                    code_state: None,
                }),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parse_named_errors() {
        assert!("none".parse::<ErrorSpec>().unwrap().is_none());
        assert_eq!("X".parse::<ErrorSpec>().unwrap(), ErrorSpec::x(PI));
        let xy: ErrorSpec = "X60Y120".parse().unwrap();
        // Y120 is applied first.
        assert_eq!(
            xy.elements[0],
            ErrorElement::Rotation {
                axis: [0.0, 1.0, 0.0],
                angle: 120f64.to_radians()
            }
        );
        assert_eq!(xy.to_string(), "X60Y120");
        assert_eq!("R".parse::<ErrorSpec>().unwrap().to_string(), "Y90X90");
        let a: ErrorSpec = "axis:0,0,2:1.5".parse().unwrap();
        assert_eq!(a, ErrorSpec::rotation([0.0, 0.0, 1.0], 1.5).unwrap());
        assert!("Q90".parse::<ErrorSpec>().is_err());
        assert!("axis:1,0:1".parse::<ErrorSpec>().is_err());
    }

    #[test]
    fn five_cnots() {
        let dev = Device::default();
        for e in ["none", "X", "R", "H"] {
            let c = detection_circuit(&dev, &e.parse().unwrap(), None).unwrap();
            assert_eq!(c.ecr_count(), 5);
        }
    }

    #[test]
    fn error_must_target_q1() {
        let dev = Device::default();
        let wrong = [GateOp::x(Q3, PI, 53.3)];
        assert!(build_detection_circuit(&dev, &wrong, None, true).is_err());
        let measure = [GateOp::measure(Q1, 0)];
        assert!(build_detection_circuit(&dev, &measure, None, true).is_err());
    }

    #[test]
    fn composite_axis_angle_of_r() {
        let (axis, theta) = "R".parse::<ErrorSpec>().unwrap().axis_angle();
        assert!((theta - 2.0 * PI / 3.0).abs() < 1e-12);
        for a in axis {
            assert!((a.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }
}
