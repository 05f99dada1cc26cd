use rand::{Rng as _, SeedableRng};
use serde::{Deserialize, Serialize};

use super::tree::{grow, Binned, DecisionTree, TreeParams};
use crate::domain::Rng;

/// Bagged ensemble of randomised trees; predictions are tree averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub(crate) fn fit(
        binned: &Binned,
        targets: &[f64],
        n_estimators: usize,
        bootstrap: bool,
        params: &TreeParams,
        rng: &mut Rng,
    ) -> Self {
        let n = targets.len();
        let trees = (0..n_estimators.max(1))
            .map(|_| {
                let mut tree_rng = Rng::seed_from_u64(rng.gen());
                let counts = bootstrap.then(|| {
                    let mut c = vec![0u32; n];
                    for _ in 0..n {
                        c[tree_rng.gen_range(0..n)] += 1;
                    }
                    c
                });
                grow(binned, targets, counts.as_deref(), params, &mut tree_rng)
            })
            .collect();
        RandomForest { trees }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}
