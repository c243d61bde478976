use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `amplitude * cos(theta + phase) + offset`, with `amplitude >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineFit {
    pub amplitude: f64,
    pub offset: f64,
    pub phase: f64,
    /// Standard errors of amplitude, offset and phase.
    pub std_errors: [f64; 3],
    pub residual_norm: f64,
}

impl CosineFit {
    pub fn eval(&self, theta: f64) -> f64 {
        self.amplitude * (theta + self.phase).cos() + self.offset
    }

    pub fn max(&self) -> f64 {
        self.offset + self.amplitude
    }

    pub fn min(&self) -> f64 {
        self.offset - self.amplitude
    }
}

/// Linear least squares on `a cos(theta) + b sin(theta) + c`.
pub fn fit_cosine(thetas: &[f64], values: &[f64]) -> Result<CosineFit> {
    if thetas.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: thetas.len(),
            got: values.len(),
        });
    }
    let n = thetas.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "cosine fit needs 4 points, got {n}"
        )));
    }
    let x = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => thetas[i].cos(),
        1 => thetas[i].sin(),
        _ => 1.0,
    });
    let y = DVector::from_column_slice(values);
    let normal: Matrix3<f64> = (x.transpose() * &x).fixed_view::<3, 3>(0, 0).into_owned();
    let scale = normal.diagonal().max();
    let inv = match normal.try_inverse() {
        Some(inv) if normal.determinant().abs() > 1e-12 * scale.powi(3) => inv,
        _ => return Err(Error::Numerical("cosine fit design is singular".into())),
    };
    let beta = inv * (x.transpose() * &y).fixed_view::<3, 1>(0, 0);
    let (a, b, c) = (beta[0], beta[1], beta[2]);
    let resid = &y - &x * DVector::from_column_slice(beta.as_slice());
    let rss = resid.norm_squared();
    let sigma2 = if n > 3 { rss / (n - 3) as f64 } else { 0.0 };
    let cov = inv * sigma2;
    let amplitude = a.hypot(b);
    let phase = (-b).atan2(a);
    // Gradients of amplitude and phase in (a, b).
    let (da, dp) = if amplitude > 0.0 {
        (
            [a / amplitude, b / amplitude],
            [b / (amplitude * amplitude), -a / (amplitude * amplitude)],
        )
    } else {
        ([0.0; 2], [0.0; 2])
    };
    let quad = |g: [f64; 2]| {
        (g[0] * g[0] * cov[(0, 0)] + 2.0 * g[0] * g[1] * cov[(0, 1)] + g[1] * g[1] * cov[(1, 1)])
            .max(0.0)
            .sqrt()
    };
    Ok(CosineFit {
        amplitude,
        offset: c,
        phase,
        std_errors: [quad(da), cov[(2, 2)].max(0.0).sqrt(), quad(dp)],
        residual_norm: rss.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::PI;

    fn grid() -> Vec<f64> {
        (0..21).map(|i| -PI + 2.0 * PI * i as f64 / 20.0).collect()
    }

    #[test]
    fn exact_cos_squared() {
        let t = grid();
        let v: Vec<f64> = t.iter().map(|x| (x / 2.0).cos().powi(2)).collect();
        let f = fit_cosine(&t, &v).unwrap();
        assert!((f.amplitude - 0.5).abs() < 1e-9);
        assert!((f.offset - 0.5).abs() < 1e-9);
        assert!(f.phase.abs() < 1e-9);
    }

    #[test]
    fn constant_data_has_no_amplitude() {
        let t = grid();
        let f = fit_cosine(&t, &vec![0.3; t.len()]).unwrap();
        assert!(f.amplitude < 1e-12);
        assert!((f.offset - 0.3).abs() < 1e-12);
    }

    #[test]
    fn noisy_data_within_three_sigma() {
        let t = grid();
        let (amp, off, ph) = (0.3, 0.4, 0.7);
        let mut rng = stream(17, &[]);
        let v: Vec<f64> = t
            .iter()
            .map(|x| amp * (x + ph).cos() + off + 0.01 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let f = fit_cosine(&t, &v).unwrap();
        assert!((f.amplitude - amp).abs() < 3.0 * f.std_errors[0]);
        assert!((f.offset - off).abs() < 3.0 * f.std_errors[1]);
        assert!((f.phase - ph).abs() < 3.0 * f.std_errors[2]);
    }

    #[test]
    fn equal_thetas_are_singular() {
        assert!(matches!(
            fit_cosine(&[0.5; 6], &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]),
            Err(Error::Numerical(_))
        ));
        assert!(fit_cosine(&[0.0, 1.0, 2.0], &[0.0; 3]).is_err());
    }
}
