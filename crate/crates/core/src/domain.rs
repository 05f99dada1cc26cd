//! Shared domain types: box bounds, evaluated points, the evaluation budget
//! ledger and the named random streams used by every run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic random generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Strict "being better than" relation for minimisation.
pub fn is_better(a: f64, b: f64) -> Result<bool> {
    if !a.is_finite() {
        return Err(Error::InvalidFitness(a));
    }
    if !b.is_finite() {
        return Err(Error::InvalidFitness(b));
    }
    Ok(a < b)
}

/// Per-dimension box constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidBounds("zero dimensions".into()));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidBounds(format!("dimension {i}: [{lo}, {hi}]")));
            }
        }
        Ok(Bounds { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Bounds::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    /// Concatenates two bound sets (used by hybrid compositions).
    pub fn concat(&self, other: &Bounds) -> Bounds {
        let mut lower = self.lower.clone();
        lower.extend_from_slice(&other.lower);
        let mut upper = self.upper.clone();
        upper.extend_from_slice(&other.upper);
        Bounds { lower, upper }
    }
}

/// Projects every component of `v` into its interval.
pub fn clamp(v: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    if v.len() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            actual: v.len(),
        });
    }
    Ok(v.iter()
        .zip(bounds.lower.iter().zip(&bounds.upper))
        .map(|(x, (lo, hi))| x.clamp(*lo, *hi))
        .collect())
}

/// A point whose true quality has been computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedSolution {
    pub vector: Vec<f64>,
    pub fitness: f64,
    /// 1-based budget unit that produced this value.
    pub eval_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub evaluations: usize,
    pub best: f64,
}

/// Counts true quality-function calls against a hard limit and tracks the
/// best-so-far curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationLedger {
    budget_limit: usize,
    used: usize,
    best_curve: Vec<CurvePoint>,
}

impl EvaluationLedger {
    pub fn new(budget_limit: usize) -> Self {
        EvaluationLedger {
            budget_limit,
            used: 0,
            best_curve: Vec::new(),
        }
    }

    pub fn budget_limit(&self) -> usize {
        self.budget_limit
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.budget_limit - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.budget_limit
    }

    pub fn best(&self) -> f64 {
        self.best_curve.last().map_or(f64::INFINITY, |p| p.best)
    }

    pub fn best_curve(&self) -> &[CurvePoint] {
        &self.best_curve
    }

    /// Books one true evaluation. Returns the 1-based index of the budget
    /// unit it consumed.
    pub fn record_evaluation(&mut self, fitness: f64) -> Result<usize> {
        if !fitness.is_finite() {
            return Err(Error::InvalidFitness(fitness));
        }
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted {
                limit: self.budget_limit,
            });
        }
        self.used += 1;
        let best = self.best().min(fitness);
        self.best_curve.push(CurvePoint {
            evaluations: self.used,
            best,
        });
        Ok(self.used)
    }
}

/// The concerns that own an independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    PopulationInit,
    DeOperators,
    StrategyBernoulli,
    LearnerTraining,
    ShiftGeneration,
}

impl StreamKind {
    pub fn name(self) -> &'static str {
        match self {
            StreamKind::PopulationInit => "population_init",
            StreamKind::DeOperators => "de_operators",
            StreamKind::StrategyBernoulli => "strategy_bernoulli",
            StreamKind::LearnerTraining => "learner_training",
            StreamKind::ShiftGeneration => "shift_generation",
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a label (FNV-1a followed by a finaliser).
pub fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(h)
}

/// Derives a child seed from a parent seed and a label.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    splitmix64(seed ^ label_hash(label))
}

/// Independent deterministic streams for one run.
///
/// Each stream depends only on `(base_seed, run_index, stream name)`, so
/// toggling strategies or learners never perturbs population initialisation.
#[derive(Debug, Clone)]
pub struct RngStreams {
    pub population_init: Rng,
    pub de_operators: Rng,
    pub strategy_bernoulli: Rng,
    pub learner_training: Rng,
    pub shift_generation: Rng,
}

impl RngStreams {
    pub fn new(base_seed: u64, run_index: u64) -> Self {
        let make = |kind: StreamKind| Self::stream(base_seed, run_index, kind);
        RngStreams {
            population_init: make(StreamKind::PopulationInit),
            de_operators: make(StreamKind::DeOperators),
            strategy_bernoulli: make(StreamKind::StrategyBernoulli),
            learner_training: make(StreamKind::LearnerTraining),
            shift_generation: make(StreamKind::ShiftGeneration),
        }
    }

    pub fn stream(base_seed: u64, run_index: u64, kind: StreamKind) -> Rng {
        let seed = splitmix64(splitmix64(base_seed) ^ splitmix64(run_index.wrapping_add(1)));
        Rng::seed_from_u64(derive_seed(seed, kind.name()))
    }
}
