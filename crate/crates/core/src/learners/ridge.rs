use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::linalg::{cholesky, cholesky_solve, cholesky_with_jitter};

/// Linear model fitted by L2-penalised least squares. The intercept, when
/// present, is not penalised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ridge {
    weights: Vec<f64>,
    intercept: f64,
}

impl Ridge {
    /// Solves `(Xc^T Xc + alpha I) w = Xc^T yc` on centred data (or raw data
    /// without an intercept). A rank-deficient system gets diagonal jitter
    /// instead of an error.
    pub(crate) fn fit(data: &Dataset, targets: &[f64], alpha: f64, fit_intercept: bool) -> Self {
        let p = data.n_features();
        let n = data.len() as f64;
        let (x_mean, y_mean) = if fit_intercept {
            let mut xm = vec![0.0; p];
            for row in data.rows() {
                for (m, v) in xm.iter_mut().zip(row) {
                    *m += v;
                }
            }
            xm.iter_mut().for_each(|m| *m /= n);
            (xm, targets.iter().sum::<f64>() / n)
        } else {
            (vec![0.0; p], 0.0)
        };

        let mut gram = vec![0.0; p * p];
        let mut rhs = vec![0.0; p];
        let mut centred = vec![0.0; p];
        for (row, y) in data.rows().zip(targets) {
            for j in 0..p {
                centred[j] = row[j] - x_mean[j];
            }
            let yc = y - y_mean;
            for j in 0..p {
                let cj = centred[j];
                if cj == 0.0 {
                    continue;
                }
                rhs[j] += cj * yc;
                let g = &mut gram[j * p..j * p + j + 1];
                for (k, gk) in g.iter_mut().enumerate() {
                    *gk += cj * centred[k];
                }
            }
        }
        for j in 0..p {
            for k in 0..j {
                gram[k * p + j] = gram[j * p + k];
            }
            gram[j * p + j] += alpha;
        }
        let scale = (0..p).map(|j| gram[j * p + j].abs()).fold(1.0, f64::max);
        let mut factor = gram.clone();
        if !cholesky(&mut factor, p) {
            factor = cholesky_with_jitter(&gram, p, scale * 1e-12, scale * 1e6)
                .expect("jitter of 1e6 times the largest pivot always factorises")
                .0;
        }
        let weights = cholesky_solve(&factor, p, &rhs);
        let intercept = if fit_intercept {
            y_mean - weights.iter().zip(&x_mean).map(|(w, m)| w * m).sum::<f64>()
        } else {
            0.0
        };
        Ridge { weights, intercept }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}
