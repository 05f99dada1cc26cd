use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::tree::{grow, Binned, DecisionTree, TreeParams};
use crate::domain::Rng;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Additive ensemble of shallow regression trees fitted to residuals.
///
/// Regression uses squared loss. Classification uses logistic loss with
/// one Newton step per leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosting {
    init: f64,
    learning_rate: f64,
    logistic: bool,
    trees: Vec<DecisionTree>,
}

impl GradientBoosting {
    pub(crate) fn fit(
        data: &Dataset,
        binned: &Binned,
        rounds: usize,
        learning_rate: f64,
        params: &TreeParams,
        logistic: bool,
        rng: &mut Rng,
    ) -> Self {
        let y = data.targets();
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let init = if logistic {
            let p = mean.clamp(1e-6, 1.0 - 1e-6);
            (p / (1.0 - p)).ln()
        } else {
            mean
        };
        let mut raw = vec![init; y.len()];
        let mut residual = vec![0.0; y.len()];
        let mut trees = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            for i in 0..y.len() {
                residual[i] = if logistic {
                    y[i] - sigmoid(raw[i])
                } else {
                    y[i] - raw[i]
                };
            }
            let mut tree = grow(binned, &residual, None, params, rng);
            if logistic {
                let leaves: Vec<usize> = data.rows().map(|r| tree.leaf_index(r)).collect();
                let mut newton = BTreeMap::<usize, (f64, f64)>::new();
                for (i, leaf) in leaves.iter().enumerate() {
                    let p = sigmoid(raw[i]);
                    let e = newton.entry(*leaf).or_insert((0.0, 0.0));
                    e.0 += residual[i];
                    e.1 += p * (1.0 - p);
                }
                for (leaf, (g, h)) in newton {
                    let step = if h.abs() < 1e-12 { 0.0 } else { g / h };
                    tree.set_leaf_value(leaf, step);
                }
                for (i, leaf) in leaves.iter().enumerate() {
                    raw[i] += learning_rate * tree.leaf_value(*leaf);
                }
            } else {
                for (i, r) in data.rows().enumerate() {
                    raw[i] += learning_rate * tree.predict(r);
                }
            }
            trees.push(tree);
        }
        GradientBoosting {
            init,
            learning_rate,
            logistic,
            trees,
        }
    }

    /// Raw additive score (log-odds for classification).
    pub fn raw(&self, x: &[f64]) -> f64 {
        self.init + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    /// Regression value, or probability of class 1.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let r = self.raw(x);
        if self.logistic {
            sigmoid(r)
        } else {
            r
        }
    }
}
