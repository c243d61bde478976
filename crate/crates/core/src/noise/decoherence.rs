use serde::{Deserialize, Serialize};

use crate::kernel::KrausChannel;
use crate::{Error, Result};

/// Per-qubit coherence times in microseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitNoiseParams {
    pub t1_us: Vec<f64>,
    /// Hahn-echo T2.
    pub t2_echo_us: Vec<f64>,
}

impl QubitNoiseParams {
    pub fn new(t1_us: Vec<f64>, t2_echo_us: Vec<f64>) -> Result<Self> {
        let p = Self { t1_us, t2_echo_us };
        p.validate()?;
        Ok(p)
    }

    /// Measured device values for Q1..Q4.
    pub fn measured() -> Self {
        Self {
            t1_us: vec![33.0, 36.0, 31.0, 29.0],
            t2_echo_us: vec![17.0, 16.0, 18.0, 22.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t1_us.len() != self.t2_echo_us.len() {
            return Err(Error::DimensionMismatch {
                expected: self.t1_us.len(),
                got: self.t2_echo_us.len(),
            });
        }
        for (q, (&t1, &t2)) in self.t1_us.iter().zip(&self.t2_echo_us).enumerate() {
            check_times(t1, t2).map_err(|e| match e {
                Error::InvalidArgument(msg) => Error::InvalidArgument(format!("qubit {q}: {msg}")),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.t1_us.len()
    }

    /// Channel for qubit `q` idling (or being driven) for `duration_ns`.
    pub fn channel(&self, q: usize, duration_ns: f64) -> Result<KrausChannel> {
        if q >= self.n_qubits() {
            return Err(Error::QubitOutOfRange(q));
        }
        decoherence_channel(duration_ns, self.t1_us[q], self.t2_echo_us[q])
    }

    /// Every time multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.t1_us.iter().map(|t| t * factor).collect(),
            self.t2_echo_us.iter().map(|t| t * factor).collect(),
        )
    }
}

fn check_times(t1: f64, t2: f64) -> Result<()> {
    if !(t1 > 0.0 && t2 > 0.0) || !t1.is_finite() || !t2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "T1 = {t1}, T2 = {t2} must be positive"
        )));
    }
    // Small slack so that T2 = 2 T1 computed in floating point is accepted.
    if t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "T2 = {t2} exceeds 2 T1 = {}",
            2.0 * t1
        )));
    }
    Ok(())
}

/// Amplitude damping followed by pure dephasing over `duration_ns`.
///
/// `gamma = 1 - exp(-t/T1)`, `lambda = 1 - exp(-t/T_phi)` with
/// `1/T_phi = 1/T2 - 1/(2 T1)`. Coherences decay as `exp(-t/T2)` overall.
pub fn decoherence_channel(duration_ns: f64, t1_us: f64, t2_us: f64) -> Result<KrausChannel> {
    if !(duration_ns >= 0.0) {
        return Err(Error::InvalidArgument(format!("duration {duration_ns} ns")));
    }
    check_times(t1_us, t2_us)?;
    if duration_ns == 0.0 {
        return Ok(KrausChannel::identity(1));
    }
    let t = duration_ns * 1e-3;
    let gamma = -(-t / t1_us).exp_m1();
    let rate_phi = (1.0 / t2_us - 0.5 / t1_us).max(0.0);
    let lambda = -(-t * rate_phi).exp_m1();
    KrausChannel::amplitude_damping(gamma)?.then(&KrausChannel::dephasing(lambda)?)
}
