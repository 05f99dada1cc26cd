use crate::benchmarks::Objective;
use crate::domain::{Bounds, EvaluatedSolution, RngStreams};
use crate::error::{Error, Result};
use crate::learners::{fit, latin_hypercube_sample, Dataset, LearnerKind, LearnerSpec, Mode, TrainedModel};
use crate::optimizer::{run_plain_de, DEConfig, EvaluationRecord, GenerationLog, RunRecord, TerminationReason};

/// GP predictive mean, read back on the original scale of the objective.
struct GpMean<'a> {
    model: &'a TrainedModel,
    bounds: &'a Bounds,
    mean: f64,
    scale: f64,
}

fn to_unit(x: &[f64], bounds: &Bounds) -> Vec<f64> {
    x.iter()
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
        .collect()
}

impl Objective for GpMean<'_> {
    fn bounds(&self) -> &Bounds {
        self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let y = self.model.predict_value(&to_unit(x, self.bounds))?;
        Ok(self.mean + self.scale * y)
    }
}

/// Offline Kriging: spend all but one budget unit on a Latin hypercube
/// sample, fit a GP once, optimise its mean with plain DE for `allowance`
/// model calls, and spend the last unit on the proposed solution.
pub fn run_kriging_offline(
    de: &DEConfig,
    objective: &dyn Objective,
    allowance: usize,
    streams: &mut RngStreams,
) -> Result<RunRecord> {
    if de.budget < 2 {
        return Err(Error::Config("kriging_offline needs a budget >= 2".into()));
    }
    let bounds = objective.bounds();
    let sample = latin_hypercube_sample(de.budget - 1, bounds, &mut streams.population_init);
    let values = objective.evaluate_batch(&sample, de.workers)?;

    let mut evaluations = Vec::with_capacity(de.budget);
    let mut best = f64::INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidFitness(v));
        }
        best = best.min(v);
        evaluations.push(EvaluationRecord {
            generation: 0,
            evaluations: i + 1,
            fitness: v,
            best_fitness: best,
            accepted: true,
        });
    }

    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
    let rows: Vec<Vec<f64>> = sample.iter().map(|x| to_unit(x, bounds)).collect();
    let targets: Vec<f64> = values.iter().map(|v| (v - mean) / scale).collect();
    let data = Dataset::from_rows(&rows, &targets)?;
    let spec = LearnerSpec::new(LearnerKind::Gpr, Mode::Regressor)?;
    let model = fit(&spec, &data, &mut streams.learner_training)?;

    let stand_in = GpMean {
        model: &model,
        bounds,
        mean,
        scale,
    };
    let inner = DEConfig {
        budget: allowance,
        workers: 1,
        ..de.clone()
    };
    let proposal = run_plain_de(&inner, &stand_in, streams)?.best.vector;

    let fitness = objective.evaluate(&proposal)?;
    if !fitness.is_finite() {
        return Err(Error::InvalidFitness(fitness));
    }
    best = best.min(fitness);
    evaluations.push(EvaluationRecord {
        generation: 1,
        evaluations: de.budget,
        fitness,
        best_fitness: best,
        accepted: true,
    });
    let log = |generation, evaluations, best_fitness| GenerationLog {
        generation,
        evaluations,
        best_fitness,
        accepted: 0,
        discarded: 0,
        confusion: None,
    };
    Ok(RunRecord {
        generations: vec![
            log(0, de.budget - 1, evaluations[de.budget - 2].best_fitness),
            log(1, de.budget, best),
        ],
        evaluations,
        termination: TerminationReason::Budget,
        best: EvaluatedSolution {
            vector: proposal,
            fitness,
            eval_index: de.budget,
        },
        shadow: false,
    })
}
