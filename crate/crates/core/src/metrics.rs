//! Evaluation-savings and diagnostic metrics over finished runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{GenerationLog, RunRecord};

/// Best-so-far fitness against evaluations used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    points: Vec<(usize, f64)>,
}

impl Curve {
    /// Evaluation counts must strictly increase and fitness must not increase.
    pub fn new(points: Vec<(usize, f64)>) -> Result<Self> {
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 > w[0].1 {
                return Err(Error::InvalidInput(
                    "curve must have increasing evaluations and non-increasing fitness".into(),
                ));
            }
        }
        Ok(Curve { points })
    }

    pub fn from_run(run: &RunRecord) -> Self {
        Curve { points: run.curve() }
    }

    pub fn points(&self) -> &[(usize, f64)] {
        &self.points
    }

    /// Best fitness after `n` evaluations.
    pub fn value_at(&self, n: usize) -> Option<f64> {
        let k = self.points.partition_point(|p| p.0 <= n);
        (k > 0).then(|| self.points[k - 1].1)
    }

    /// First evaluation count at which the curve is at or below `target`.
    pub fn first_reaching(&self, target: f64) -> Option<usize> {
        self.points.iter().find(|p| p.1 <= target).map(|p| p.0)
    }

    pub fn last_evaluation(&self) -> usize {
        self.points.last().map_or(0, |p| p.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaE {
    pub n: usize,
    pub m: usize,
    pub value: i64,
    /// The baseline never reached the surrogate's fitness; `m` is the end of
    /// the baseline curve and `value` is a lower bound.
    pub censored: bool,
}

/// Extra evaluations the baseline needs to match the surrogate's fitness at
/// `n` evaluations.
pub fn delta_e(surrogate: &Curve, baseline: &Curve, n: usize) -> Result<DeltaE> {
    if n == 0 || n > surrogate.last_evaluation() {
        return Err(Error::InvalidInput(format!(
            "n = {n} lies outside the surrogate curve (1..={})",
            surrogate.last_evaluation()
        )));
    }
    let target = surrogate
        .value_at(n)
        .ok_or_else(|| Error::InvalidInput(format!("no value at n = {n}")))?;
    let (m, censored) = match baseline.first_reaching(target) {
        Some(m) => (m, false),
        None => (baseline.last_evaluation(), true),
    };
    Ok(DeltaE {
        n,
        m,
        value: m as i64 - n as i64,
        censored,
    })
}

pub fn delta_e_ratio(n: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be >= 1".into()));
    }
    Ok(n as f64 / m as f64)
}

fn zeta_window(log: &[GenerationLog], d: usize, i: usize) -> Option<f64> {
    let now = log.get(i)?;
    let then = &log[i.saturating_sub(d)];
    let spent = now.evaluations.checked_sub(then.evaluations)?;
    let gain = (now.best_fitness - then.best_fitness).abs();
    if spent == 0 || gain == 0.0 || !gain.is_finite() {
        return None;
    }
    Some((gain / spent as f64).ln())
}

/// Log mean improvement per true evaluation over the `d` generations ending
/// at generation `i`. `None` when nothing was evaluated or nothing improved.
pub fn zeta(record: &RunRecord, d: usize, i: usize) -> Result<Option<f64>> {
    if i == 0 || d == 0 {
        return Err(Error::InvalidInput("zeta needs i >= 1 and d >= 1".into()));
    }
    if i >= record.generations.len() {
        return Err(Error::InvalidInput(format!(
            "generation {i} beyond the run ({} logged)",
            record.generations.len()
        )));
    }
    Ok(zeta_window(&record.generations, d, i))
}

/// ζ_d for every generation after the initial population.
pub fn zeta_series(record: &RunRecord, d: usize) -> Vec<Option<f64>> {
    (1..record.generations.len())
        .map(|i| zeta_window(&record.generations, d, i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionRates {
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn confusion_rates(tp: u64, fp: u64, tn: u64, fn_: u64) -> ConfusionRates {
    ConfusionRates {
        accuracy: ratio(tp + tn, tp + fp + tn + fn_),
        sensitivity: ratio(tp, tp + fn_),
        specificity: ratio(tn, tn + fp),
    }
}
