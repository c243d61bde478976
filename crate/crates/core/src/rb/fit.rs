use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Least-squares fit of `A alpha^m + B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    /// Covariance of `(A, alpha, B)`.
    pub covariance: [[f64; 3]; 3],
    pub residual_sum_squares: f64,
    pub n_points: usize,
}

impl DecayFit {
    pub fn alpha_std(&self) -> f64 {
        self.covariance[1][1].max(0.0).sqrt()
    }
}

fn linear_part(alpha: f64, data: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = data.len() as f64;
    let (mut sf, mut sff, mut sy, mut sfy) = (0.0, 0.0, 0.0, 0.0);
    for &(m, y) in data {
        let f = alpha.powf(m);
        sf += f;
        sff += f * f;
        sy += y;
        sfy += f * y;
    }
    let det = n * sff - sf * sf;
    let (a, b) = if det.abs() < 1e-14 * (n * sff).max(1.0) {
        (0.0, sy / n)
    } else {
        ((n * sfy - sf * sy) / det, (sff * sy - sf * sfy) / det)
    };
    let rss = data
        .iter()
        .map(|&(m, y)| (y - a * alpha.powf(m) - b).powi(2))
        .sum();
    (a, b, rss)
}

/// Fit `(length, p0)` samples. `alpha` is profiled: for each trial value
/// `A` and `B` are solved linearly, then a golden-section search refines
/// the best grid point.
pub fn fit_decay(samples: &[(usize, f64)]) -> Result<DecayFit> {
    let mut lengths: Vec<usize> = samples.iter().map(|s| s.0).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if lengths.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "decay fit needs at least 3 distinct lengths, got {}",
            lengths.len()
        )));
    }
    let data: Vec<(f64, f64)> = samples.iter().map(|&(m, y)| (m as f64, y)).collect();
    let n_points = data.len();
    let (lo, hi) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            (lo.min(d.1), hi.max(d.1))
        });
    if hi - lo < 1e-12 {
        // No decay at all.
        return Ok(DecayFit {
            a: 0.0,
            alpha: 1.0,
            b: lo,
            covariance: [[0.0; 3]; 3],
            residual_sum_squares: 0.0,
            n_points,
        });
    }
    const GRID: usize = 2000;
    let rss = |alpha: f64| linear_part(alpha, &data).2;
    let grid: Vec<f64> = (1..=GRID).map(|i| i as f64 / GRID as f64).collect();
    let best = (0..GRID)
        .min_by(|&i, &j| rss(grid[i]).total_cmp(&rss(grid[j])))
        .expect("non-empty grid");
    let (mut x0, mut x1) = (grid[best.saturating_sub(1)], grid[(best + 1).min(GRID - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while x1 - x0 > 1e-13 {
        let c = x1 - g * (x1 - x0);
        let d = x0 + g * (x1 - x0);
        if rss(c) < rss(d) {
            x1 = d;
        } else {
            x0 = c;
        }
    }
    let alpha = 0.5 * (x0 + x1);
    if alpha < 2.0 / GRID as f64 {
        return Err(Error::Numerical(format!(
            "decay fit diverged (alpha = {alpha})"
        )));
    }
    let (a, b, rss_min) = linear_part(alpha, &data);
    let mut j = DMatrix::<f64>::zeros(n_points, 3);
    for (row, &(m, _)) in data.iter().enumerate() {
        j[(row, 0)] = alpha.powf(m);
        j[(row, 1)] = if m == 0.0 {
            0.0
        } else {
            a * m * alpha.powf(m - 1.0)
        };
        j[(row, 2)] = 1.0;
    }
    let jtj: Matrix3<f64> = (j.transpose() * &j).fixed_view::<3, 3>(0, 0).into_owned();
    let dof = n_points.saturating_sub(3).max(1) as f64;
    let cov = jtj
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular decay-fit Jacobian".into()))?
        * (rss_min / dof);
    let mut covariance = [[0.0; 3]; 3];
    for (r, row) in covariance.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = cov[(r, c)];
        }
    }
    Ok(DecayFit {
        a,
        alpha,
        b,
        covariance,
        residual_sum_squares: rss_min,
        n_points,
    })
}

/// Error per Clifford `r = (1 - alpha)(1 - 1/d)`.
pub fn error_per_clifford(alpha: f64, n_qubits: usize) -> f64 {
    let d = (1usize << n_qubits) as f64;
    (1.0 - alpha) * (1.0 - 1.0 / d)
}
