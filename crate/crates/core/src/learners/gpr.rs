use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::linalg::{cholesky_solve, cholesky_with_jitter};
use crate::error::{Error, Result};

/// Largest diagonal jitter tried before giving up.
pub const MAX_JITTER: f64 = 1e-4;

/// Zero-mean Gaussian-process regressor with a squared-exponential kernel
/// and fixed hyperparameters. Only the predictive mean is kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianProcess {
    length_scale: f64,
    signal_variance: f64,
    /// Jitter that made the kernel matrix factorisable.
    jitter: f64,
    n_features: usize,
    points: Vec<f64>,
    alpha: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl GaussianProcess {
    /// Fits `alpha = (K + jitter I)^-1 y`. The jitter is multiplied by 10
    /// after each failed factorisation, up to [`MAX_JITTER`].
    pub(crate) fn fit(data: &Dataset, length_scale: f64, signal_variance: f64, jitter: f64) -> Result<Self> {
        let n = data.len();
        let inv = 1.0 / (2.0 * length_scale * length_scale);
        let rows: Vec<&[f64]> = data.rows().collect();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            k[i * n + i] = signal_variance;
            for j in 0..i {
                let v = signal_variance * (-sq_dist(rows[i], rows[j]) * inv).exp();
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        let (factor, used) =
            cholesky_with_jitter(&k, n, jitter, MAX_JITTER).ok_or(Error::Cholesky { jitter: MAX_JITTER })?;
        let alpha = cholesky_solve(&factor, n, data.targets());
        let points = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(GaussianProcess {
            length_scale,
            signal_variance,
            jitter: used,
            n_features: data.n_features(),
            points,
            alpha,
        })
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let inv = 1.0 / (2.0 * self.length_scale * self.length_scale);
        self.points
            .chunks_exact(self.n_features.max(1))
            .zip(&self.alpha)
            .map(|(p, a)| a * self.signal_variance * (-sq_dist(p, x) * inv).exp())
            .sum()
    }
}
