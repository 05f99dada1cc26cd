//! Surface and pairwise surrogate models with warm-up, trail-limited pair
//! construction and end-of-generation retraining.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{EvaluatedSolution, Rng};
use crate::error::{Error, Result};
use crate::learners::{self, Dataset, LearnerKind, LearnerSpec, Mode, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    Surface,
    Pairwise,
}

impl Approach {
    pub fn mode(self) -> Mode {
        match self {
            Approach::Surface => Mode::Regressor,
            Approach::Pairwise => Mode::Classifier,
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::Surface => "surface",
            Approach::Pairwise => "pairwise",
        })
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "surface" => Ok(Approach::Surface),
            "pairwise" => Ok(Approach::Pairwise),
            _ => Err(Error::Config(format!("unknown approach `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    /// `(x, y)`
    Plain,
    /// `(x, y, x - y)`
    #[default]
    Extended,
}

pub const DEFAULT_TRAIL_SIZE: usize = 45;

/// Warm-up length in generations for a learner used as a surface regressor
/// or a pairwise classifier.
pub fn default_warmup(kind: LearnerKind, approach: Approach) -> usize {
    use Approach::{Pairwise, Surface};
    match (kind, approach) {
        (LearnerKind::RandomForest, Surface) => 40,
        (LearnerKind::RandomForest, Pairwise) => 20,
        (LearnerKind::Mlp, Surface) => 30,
        (LearnerKind::Mlp, Pairwise) => 2,
        (LearnerKind::Ridge, Surface) => 10,
        (LearnerKind::Ridge, Pairwise) => 2,
        (LearnerKind::DecisionTree, Surface) => 30,
        (LearnerKind::DecisionTree, Pairwise) => 4,
        (LearnerKind::GradientBoosting, Surface) => 2,
        (LearnerKind::GradientBoosting, Pairwise) => 6,
        (LearnerKind::Gpr, _) => 10,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    pub approach: Approach,
    pub learner: LearnerSpec,
    pub warmup_generations: usize,
    pub trail_size: usize,
    pub mapping: Mapping,
}

impl SurrogateConfig {
    /// Default warm-up, trail and mapping for `learner` under `approach`.
    pub fn new(approach: Approach, kind: LearnerKind) -> Result<Self> {
        let cfg = SurrogateConfig {
            approach,
            learner: LearnerSpec::new(kind, approach.mode())?,
            warmup_generations: default_warmup(kind, approach),
            trail_size: DEFAULT_TRAIL_SIZE,
            mapping: Mapping::Extended,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.learner.mode != self.approach.mode() {
            return Err(Error::Config(format!(
                "{} surrogates need a {:?} learner",
                self.approach,
                self.approach.mode()
            )));
        }
        if self.warmup_generations == 0 {
            return Err(Error::Config("warmup_generations must be >= 1".into()));
        }
        if self.trail_size == 0 {
            return Err(Error::Config("trail_size must be >= 1".into()));
        }
        Ok(())
    }

    /// `DT/C`, `Ridge/R`, ...
    pub fn label(&self) -> String {
        self.learner.label()
    }
}

/// 1 iff `q_y` is strictly better (lower) than `q_x`.
pub fn pairwise_label(q_x: f64, q_y: f64) -> u8 {
    u8::from(q_y < q_x)
}

pub fn pairwise_map(x: &[f64], y: &[f64], mapping: Mapping) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let mut out = Vec::with_capacity(3 * x.len());
    out.extend_from_slice(x);
    out.extend_from_slice(y);
    if mapping == Mapping::Extended {
        out.extend(x.iter().zip(y).map(|(a, b)| a - b));
    }
    Ok(out)
}

pub fn in_warmup(generation: usize, cfg: &SurrogateConfig) -> bool {
    generation < cfg.warmup_generations
}

/// Every evaluated `(vector, fitness)` pair, in evaluation order.
#[derive(Debug, Clone)]
pub struct SurfaceTrainingBuffer {
    data: Dataset,
}

impl SurfaceTrainingBuffer {
    pub fn new(dim: usize) -> Self {
        SurfaceTrainingBuffer {
            data: Dataset::new(dim),
        }
    }

    pub fn ingest(&mut self, point: &EvaluatedSolution) -> Result<()> {
        self.data.push(&point.vector, point.fitness)
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }
}

/// Mapped solution pairs with their ordering labels, built against a trail
/// of the most recent evaluated solutions.
#[derive(Debug, Clone)]
pub struct PairwiseTrainingBuffer {
    data: Dataset,
    trail: VecDeque<EvaluatedSolution>,
    trail_size: usize,
    mapping: Mapping,
}

impl PairwiseTrainingBuffer {
    pub fn new(dim: usize, trail_size: usize, mapping: Mapping) -> Self {
        let width = match mapping {
            Mapping::Plain => 2 * dim,
            Mapping::Extended => 3 * dim,
        };
        PairwiseTrainingBuffer {
            data: Dataset::new(width),
            trail: VecDeque::with_capacity(trail_size + 1),
            trail_size,
            mapping,
        }
    }

    /// Pairs `point` with every trail member in both orientations, then
    /// pushes it onto the trail.
    pub fn ingest(&mut self, point: &EvaluatedSolution) -> Result<()> {
        for p in &self.trail {
            let row = pairwise_map(&p.vector, &point.vector, self.mapping)?;
            self.data
                .push(&row, f64::from(pairwise_label(p.fitness, point.fitness)))?;
            let row = pairwise_map(&point.vector, &p.vector, self.mapping)?;
            self.data
                .push(&row, f64::from(pairwise_label(point.fitness, p.fitness)))?;
        }
        self.trail.push_back(point.clone());
        if self.trail.len() > self.trail_size {
            self.trail.pop_front();
        }
        Ok(())
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    fn has_both_classes(&self) -> bool {
        let y = self.data.targets();
        y.iter().any(|v| *v == 0.0) && y.iter().any(|v| *v == 1.0)
    }
}

#[derive(Debug, Clone)]
enum Buffer {
    Surface(SurfaceTrainingBuffer),
    Pairwise(PairwiseTrainingBuffer),
}

/// A surrogate's training buffer and its most recent fit.
#[derive(Debug, Clone)]
pub struct SurrogateModel {
    cfg: SurrogateConfig,
    buffer: Buffer,
    model: Option<TrainedModel>,
    fits: usize,
}

impl SurrogateModel {
    pub fn new(cfg: SurrogateConfig, dim: usize) -> Result<Self> {
        cfg.validate()?;
        let buffer = match cfg.approach {
            Approach::Surface => Buffer::Surface(SurfaceTrainingBuffer::new(dim)),
            Approach::Pairwise => Buffer::Pairwise(PairwiseTrainingBuffer::new(dim, cfg.trail_size, cfg.mapping)),
        };
        Ok(SurrogateModel {
            cfg,
            buffer,
            model: None,
            fits: 0,
        })
    }

    pub fn config(&self) -> &SurrogateConfig {
        &self.cfg
    }

    pub fn ingest(&mut self, point: &EvaluatedSolution) -> Result<()> {
        match &mut self.buffer {
            Buffer::Surface(b) => b.ingest(point),
            Buffer::Pairwise(b) => b.ingest(point),
        }
    }

    pub fn buffer_rows(&self) -> usize {
        self.data().len()
    }

    fn data(&self) -> &Dataset {
        match &self.buffer {
            Buffer::Surface(b) => b.data(),
            Buffer::Pairwise(b) => b.data(),
        }
    }

    /// Refits the learner on the whole buffer. Returns `false` and keeps the
    /// previous state when the buffer is empty, holds a single class, or has
    /// not changed since the last fit.
    pub fn retrain(&mut self, rng: &mut Rng) -> Result<bool> {
        let rows = self.buffer_rows();
        if rows == 0 {
            return Ok(false);
        }
        if let Buffer::Pairwise(b) = &self.buffer {
            if !b.has_both_classes() {
                return Ok(false);
            }
        }
        if self.model.as_ref().is_some_and(|m| m.training_row_count == rows) {
            return Ok(false);
        }
        let uses_index = matches!(
            self.cfg.learner.kind,
            LearnerKind::DecisionTree | LearnerKind::RandomForest | LearnerKind::GradientBoosting
        );
        let data = match &mut self.buffer {
            Buffer::Surface(b) => &mut b.data,
            Buffer::Pairwise(b) => &mut b.data,
        };
        if uses_index {
            data.update_index();
        }
        self.model = Some(learners::fit(&self.cfg.learner, data, rng)?);
        self.fits += 1;
        Ok(true)
    }

    /// False while no usable model exists; the filter then accepts every
    /// challenger.
    pub fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    pub fn fit_count(&self) -> usize {
        self.fits
    }

    pub fn model(&self) -> Option<&TrainedModel> {
        self.model.as_ref()
    }

    fn fitted(&self) -> Result<&TrainedModel> {
        self.model.as_ref().ok_or(Error::Unfitted)
    }

    pub fn surface_estimate(&self, x: &[f64]) -> Result<f64> {
        self.fitted()?.predict_value(x)
    }

    /// Whether `challenger` is predicted to improve on `current`.
    pub fn pairwise_estimate(&self, current: &[f64], challenger: &[f64]) -> Result<bool> {
        let row = pairwise_map(current, challenger, self.cfg.mapping)?;
        Ok(self.fitted()?.predict_class(&row)? == 1)
    }

    /// Classifier margin for the pair, used as the pairwise quality gap.
    pub fn pairwise_margin(&self, current: &[f64], challenger: &[f64]) -> Result<f64> {
        let row = pairwise_map(current, challenger, self.cfg.mapping)?;
        self.fitted()?.class_margin(&row)
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng as _, SeedableRng};

    use super::*;

    fn point(vector: Vec<f64>, fitness: f64) -> EvaluatedSolution {
        EvaluatedSolution {
            vector,
            fitness,
            eval_index: 0,
        }
    }

    #[test]
    fn labels() {
        assert_eq!(pairwise_label(3.0, 2.0), 1);
        assert_eq!(pairwise_label(2.0, 3.0), 0);
        assert_eq!(pairwise_label(2.0, 2.0), 0);
    }

    #[test]
    fn mappings() {
        assert_eq!(
            pairwise_map(&[1.0, 2.0], &[3.0, 5.0], Mapping::Plain).unwrap(),
            vec![1.0, 2.0, 3.0, 5.0]
        );
        assert_eq!(
            pairwise_map(&[1.0, 2.0], &[3.0, 5.0], Mapping::Extended).unwrap(),
            vec![1.0, 2.0, 3.0, 5.0, -2.0, -3.0]
        );
        assert_eq!(
            pairwise_map(&[4.0, 7.0], &[4.0, 7.0], Mapping::Extended).unwrap(),
            vec![4.0, 7.0, 4.0, 7.0, 0.0, 0.0]
        );
        assert!(pairwise_map(&[1.0], &[1.0, 2.0], Mapping::Plain).is_err());
    }

    #[test]
    fn warmup_boundaries() {
        let dt = SurrogateConfig::new(Approach::Pairwise, LearnerKind::DecisionTree).unwrap();
        assert!(in_warmup(3, &dt));
        assert!(!in_warmup(4, &dt));
        let mlp = SurrogateConfig::new(Approach::Pairwise, LearnerKind::Mlp).unwrap();
        assert!(in_warmup(0, &mlp));
        assert_eq!(mlp.warmup_generations, 2);
    }

    #[test]
    fn config_rejects_mismatched_mode() {
        let mut cfg = SurrogateConfig::new(Approach::Surface, LearnerKind::Ridge).unwrap();
        cfg.approach = Approach::Pairwise;
        assert!(cfg.validate().is_err());
        assert!(SurrogateConfig::new(Approach::Pairwise, LearnerKind::Gpr).is_err());
    }

    #[test]
    fn ingest_row_counts() {
        let mut b = PairwiseTrainingBuffer::new(2, 45, Mapping::Extended);
        b.ingest(&point(vec![0.0, 0.0], 1.0)).unwrap();
        assert_eq!(b.data().len(), 0);
        b.ingest(&point(vec![1.0, 0.0], 2.0)).unwrap();
        let before = b.data().len();
        b.ingest(&point(vec![0.0, 1.0], 0.5)).unwrap();
        assert_eq!(b.data().len() - before, 4);
        assert_eq!(b.data().n_features(), 6);

        let mut s = SurfaceTrainingBuffer::new(2);
        s.ingest(&point(vec![0.0, 0.0], 1.0)).unwrap();
        assert_eq!(s.data().len(), 1);
    }

    #[test]
    fn pairwise_rows_follow_closed_form() {
        let trail = 45;
        let mut b = PairwiseTrainingBuffer::new(3, trail, Mapping::Extended);
        let mut rng = Rng::seed_from_u64(5);
        for i in 1..=100usize {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            b.ingest(&point(x, rng.gen())).unwrap();
            let expected: usize = (1..=i).map(|j| 2 * (j - 1).min(trail)).sum();
            assert_eq!(b.data().len(), expected);
            assert!(b.trail_len() <= trail);
        }
    }

    #[test]
    fn labels_are_antisymmetric_in_buffer() {
        let mut b = PairwiseTrainingBuffer::new(1, 10, Mapping::Plain);
        for (i, f) in [3.0, 1.0, 2.0, 2.0].into_iter().enumerate() {
            b.ingest(&point(vec![i as f64], f)).unwrap();
        }
        let y = b.data().targets();
        for pair in y.chunks(2) {
            assert!(pair[0] + pair[1] <= 1.0);
        }
    }

    #[test]
    fn single_class_buffer_stays_pass_through() {
        let cfg = SurrogateConfig::new(Approach::Pairwise, LearnerKind::DecisionTree).unwrap();
        let mut m = SurrogateModel::new(cfg, 1).unwrap();
        let mut rng = Rng::seed_from_u64(0);
        assert!(!m.retrain(&mut rng).unwrap());
        for i in 0..3 {
            m.ingest(&point(vec![i as f64], 1.0)).unwrap();
        }
        assert!(!m.retrain(&mut rng).unwrap());
        assert!(!m.is_fitted());
        assert!(matches!(m.pairwise_estimate(&[0.0], &[1.0]), Err(Error::Unfitted)));
    }

    #[test]
    fn surface_model_scores_its_training_points() {
        let cfg = SurrogateConfig::new(Approach::Surface, LearnerKind::DecisionTree).unwrap();
        let mut m = SurrogateModel::new(cfg, 2).unwrap();
        let mut rng = Rng::seed_from_u64(1);
        let pts: Vec<EvaluatedSolution> = (0..10)
            .map(|i| point(vec![i as f64, (i * i) as f64], (i as f64).sqrt()))
            .collect();
        for p in &pts {
            m.ingest(p).unwrap();
        }
        assert!(m.retrain(&mut rng).unwrap());
        for p in &pts {
            assert_eq!(m.surface_estimate(&p.vector).unwrap(), p.fitness);
        }
        assert!(!m.retrain(&mut rng).unwrap(), "unchanged buffer is not refit");
        assert_eq!(m.fit_count(), 1);
    }

    #[test]
    fn pairwise_model_orders_by_first_coordinate() {
        let cfg = SurrogateConfig::new(Approach::Pairwise, LearnerKind::DecisionTree).unwrap();
        let mut m = SurrogateModel::new(cfg, 4).unwrap();
        let mut rng = Rng::seed_from_u64(2);
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..6.0)).collect();
            let f = x[0];
            m.ingest(&point(x, f)).unwrap();
        }
        m.retrain(&mut rng).unwrap();
        let x = [5.0, 3.0, 3.0, 3.0];
        let y = [1.0, 3.0, 3.0, 3.0];
        assert!(m.pairwise_estimate(&x, &y).unwrap());
        assert!(!m.pairwise_estimate(&y, &x).unwrap());
    }
}
