//! Differential evolution (rand/1/exp) with a pluggable challenger filter,
//! budget and stagnation termination, and shadow-mode instrumentation.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Objective;
use crate::domain::{clamp, is_better, Bounds, EvaluatedSolution, EvaluationLedger, Rng, RngStreams};
use crate::error::{Error, Result};
use crate::strategies::{combined_accept, diversity_distance, update_means, RunningMeans, StrategyFlags};
use crate::surrogate::{Approach, SurrogateConfig, SurrogateModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DEConfig {
    pub pop_size: usize,
    pub f: f64,
    pub cr: f64,
    pub budget: usize,
    pub no_improvement_limit: usize,
    /// Threads used to evaluate one generation's accepted challengers.
    pub workers: usize,
}

impl Default for DEConfig {
    fn default() -> Self {
        DEConfig {
            pop_size: 15,
            f: 0.5,
            cr: 0.5,
            budget: 750,
            no_improvement_limit: 50,
            workers: 1,
        }
    }
}

impl DEConfig {
    /// Default settings with a budget of `multiplier * dim` evaluations.
    pub fn for_dim(dim: usize, multiplier: usize) -> Self {
        DEConfig {
            budget: multiplier * dim,
            ..DEConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 {
            return Err(Error::Config("pop_size must be >= 4".into()));
        }
        if !(0.0..=1.0).contains(&self.f) || !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::Config("F and CR must lie in [0, 1]".into()));
        }
        if self.no_improvement_limit == 0 {
            return Err(Error::Config("no_improvement_limit must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    Budget,
    NoImprovement,
}

impl TerminationReason {
    pub fn name(self) -> &'static str {
        match self {
            TerminationReason::Budget => "budget",
            TerminationReason::NoImprovement => "no_improvement",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl Confusion {
    pub fn add(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }

    fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }
}

/// One true evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub generation: usize,
    pub evaluations: usize,
    pub fitness: f64,
    pub best_fitness: f64,
    /// False only for challengers evaluated in shadow mode against the
    /// filter's verdict.
    pub accepted: bool,
}

/// State after one generation. Generation 0 is the initial population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub evaluations: usize,
    pub best_fitness: f64,
    pub accepted: usize,
    pub discarded: usize,
    pub confusion: Option<Confusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub evaluations: Vec<EvaluationRecord>,
    pub generations: Vec<GenerationLog>,
    pub termination: TerminationReason,
    pub best: EvaluatedSolution,
    pub shadow: bool,
}

impl RunRecord {
    pub fn evaluations_used(&self) -> usize {
        self.evaluations.len()
    }

    /// Best population fitness at the end of the run.
    pub fn final_best(&self) -> f64 {
        self.best.fitness
    }

    /// `(evaluations, best-so-far)` after every true evaluation.
    pub fn curve(&self) -> Vec<(usize, f64)> {
        self.evaluations
            .iter()
            .map(|e| (e.evaluations, e.best_fitness))
            .collect()
    }

    pub fn confusion_total(&self) -> Option<Confusion> {
        if !self.shadow {
            return None;
        }
        let mut total = Confusion::default();
        for g in &self.generations {
            if let Some(c) = &g.confusion {
                total.add(c);
            }
        }
        Some(total)
    }
}

/// Surrogate verdict for one challenger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub accept: bool,
    /// Predicted quality gap used by the quality-distance relaxation.
    pub quality_gap: f64,
}

/// Decides which challengers are truly evaluated.
pub trait ChallengerFilter {
    /// Whether the filter is consulted in `generation`. Inactive filters
    /// (warm-up, no model yet) let every challenger through.
    fn is_active(&self, generation: usize) -> bool;

    fn verdict(&mut self, current: &EvaluatedSolution, challenger: &[f64]) -> Result<Verdict>;

    /// Called for every evaluated point the search keeps track of.
    fn ingest(&mut self, point: &EvaluatedSolution) -> Result<()>;

    fn end_generation(&mut self, _generation: usize, _rng: &mut Rng) -> Result<()> {
        Ok(())
    }
}

/// Accepts everything: plain differential evolution.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptAll;

impl ChallengerFilter for AcceptAll {
    fn is_active(&self, _generation: usize) -> bool {
        true
    }

    fn verdict(&mut self, _: &EvaluatedSolution, _: &[f64]) -> Result<Verdict> {
        Ok(Verdict {
            accept: true,
            quality_gap: 0.0,
        })
    }

    fn ingest(&mut self, _: &EvaluatedSolution) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RejectAll;

impl ChallengerFilter for RejectAll {
    fn is_active(&self, _generation: usize) -> bool {
        true
    }

    fn verdict(&mut self, _: &EvaluatedSolution, _: &[f64]) -> Result<Verdict> {
        Ok(Verdict {
            accept: false,
            quality_gap: 0.0,
        })
    }

    fn ingest(&mut self, _: &EvaluatedSolution) -> Result<()> {
        Ok(())
    }
}

/// Peeks at the true objective (without charging the budget) and accepts
/// exactly the improving challengers.
pub struct OracleFilter<'a> {
    pub objective: &'a dyn Objective,
}

impl ChallengerFilter for OracleFilter<'_> {
    fn is_active(&self, _generation: usize) -> bool {
        true
    }

    fn verdict(&mut self, current: &EvaluatedSolution, challenger: &[f64]) -> Result<Verdict> {
        let q = self.objective.evaluate(challenger)?;
        Ok(Verdict {
            accept: is_better(q, current.fitness)?,
            quality_gap: (q - current.fitness).abs(),
        })
    }

    fn ingest(&mut self, _: &EvaluatedSolution) -> Result<()> {
        Ok(())
    }
}

/// A learned surrogate with warm-up and end-of-generation retraining.
#[derive(Debug, Clone)]
pub struct SurrogateFilter {
    model: SurrogateModel,
}

impl SurrogateFilter {
    pub fn new(cfg: SurrogateConfig, dim: usize) -> Result<Self> {
        Ok(SurrogateFilter {
            model: SurrogateModel::new(cfg, dim)?,
        })
    }

    pub fn model(&self) -> &SurrogateModel {
        &self.model
    }
}

impl ChallengerFilter for SurrogateFilter {
    fn is_active(&self, generation: usize) -> bool {
        generation >= self.model.config().warmup_generations && self.model.is_fitted()
    }

    fn verdict(&mut self, current: &EvaluatedSolution, challenger: &[f64]) -> Result<Verdict> {
        match self.model.config().approach {
            Approach::Surface => {
                let q_hat = self.model.surface_estimate(challenger)?;
                let q_hat_current = self.model.surface_estimate(&current.vector)?;
                Ok(Verdict {
                    accept: q_hat < current.fitness,
                    quality_gap: (q_hat_current - q_hat).abs(),
                })
            }
            Approach::Pairwise => Ok(Verdict {
                accept: self.model.pairwise_estimate(&current.vector, challenger)?,
                quality_gap: self.model.pairwise_margin(&current.vector, challenger)?,
            }),
        }
    }

    fn ingest(&mut self, point: &EvaluatedSolution) -> Result<()> {
        self.model.ingest(point)
    }

    /// Refits only when the model will be consulted in the next generation.
    fn end_generation(&mut self, generation: usize, rng: &mut Rng) -> Result<()> {
        if generation + 1 >= self.model.config().warmup_generations {
            self.model.retrain(rng)?;
        }
        Ok(())
    }
}

/// Uniform random population, truly evaluated.
pub fn init_population(
    cfg: &DEConfig,
    objective: &dyn Objective,
    ledger: &mut EvaluationLedger,
    rng: &mut Rng,
) -> Result<Vec<EvaluatedSolution>> {
    if ledger.remaining() < cfg.pop_size {
        return Err(Error::Config(format!(
            "budget of {} cannot cover a population of {}",
            ledger.remaining(),
            cfg.pop_size
        )));
    }
    let bounds = objective.bounds();
    let vectors: Vec<Vec<f64>> = (0..cfg.pop_size)
        .map(|_| {
            bounds
                .lower()
                .iter()
                .zip(bounds.upper())
                .map(|(lo, hi)| if lo < hi { rng.gen_range(*lo..*hi) } else { *lo })
                .collect()
        })
        .collect();
    let fitness = objective.evaluate_batch(&vectors, cfg.workers)?;
    vectors
        .into_iter()
        .zip(fitness)
        .map(|(vector, fitness)| {
            let eval_index = ledger.record_evaluation(fitness)?;
            Ok(EvaluatedSolution {
                vector,
                fitness,
                eval_index,
            })
        })
        .collect()
}

pub fn mutate_rand1(r1: &[f64], r2: &[f64], r3: &[f64], f: f64, bounds: &Bounds) -> Result<Vec<f64>> {
    let v: Vec<f64> = r1
        .iter()
        .zip(r2.iter().zip(r3))
        .map(|(a, (b, c))| a + f * (b - c))
        .collect();
    clamp(&v, bounds)
}

/// Exponential crossover: a circular run of mutant components starting at a
/// random index, extended while uniform draws stay below `cr`.
pub fn crossover_exp(target: &[f64], mutant: &[f64], cr: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    if target.len() != mutant.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: mutant.len(),
        });
    }
    let n = target.len();
    let mut trial = target.to_vec();
    if n == 0 {
        return Ok(trial);
    }
    let mut k = rng.gen_range(0..n);
    let mut copied = 0;
    loop {
        trial[k] = mutant[k];
        copied += 1;
        k = (k + 1) % n;
        if copied == n || rng.gen::<f64>() >= cr {
            break;
        }
    }
    Ok(trial)
}

fn pick_distinct(n: usize, exclude: usize, rng: &mut Rng) -> [usize; 3] {
    let mut out = [0usize; 3];
    let mut k = 0;
    while k < 3 {
        let r = rng.gen_range(0..n);
        if r != exclude && !out[..k].contains(&r) {
            out[k] = r;
            k += 1;
        }
    }
    out
}

fn best_of(pop: &[EvaluatedSolution]) -> &EvaluatedSolution {
    pop.iter()
        .reduce(|a, b| if b.fitness < a.fitness { b } else { a })
        .expect("population is never empty")
}

struct State<'a> {
    cfg: &'a DEConfig,
    objective: &'a dyn Objective,
    flags: &'a StrategyFlags,
    shadow: bool,
    ledger: EvaluationLedger,
    pop: Vec<EvaluatedSolution>,
    /// Points the search has accepted and evaluated; the diversity set.
    seen: Vec<Vec<f64>>,
    means: RunningMeans,
    evaluations: Vec<EvaluationRecord>,
    generations: Vec<GenerationLog>,
}

impl State<'_> {
    fn remember(&mut self, filter: &mut dyn ChallengerFilter, point: &EvaluatedSolution) -> Result<()> {
        filter.ingest(point)?;
        if self.flags.use_diver {
            let nn = diversity_distance(&point.vector, self.seen.iter().map(Vec::as_slice)).ok();
            self.means = update_means(self.means, None, nn);
            self.seen.push(point.vector.clone());
        }
        Ok(())
    }

    fn book(&mut self, generation: usize, fitness: f64, accepted: bool) -> Result<usize> {
        let index = self.ledger.record_evaluation(fitness)?;
        self.evaluations.push(EvaluationRecord {
            generation,
            evaluations: index,
            fitness,
            best_fitness: self.ledger.best(),
            accepted,
        });
        Ok(index)
    }

    fn log(&mut self, generation: usize, accepted: usize, discarded: usize, confusion: Option<Confusion>) {
        self.generations.push(GenerationLog {
            generation,
            evaluations: self.ledger.used(),
            best_fitness: best_of(&self.pop).fitness,
            accepted,
            discarded,
            confusion,
        });
    }

    /// Returns true when the budget ran out during this generation.
    fn generation(
        &mut self,
        generation: usize,
        filter: &mut dyn ChallengerFilter,
        streams: &mut RngStreams,
    ) -> Result<bool> {
        let np = self.cfg.pop_size;
        let bounds = self.objective.bounds();
        let mut challengers = Vec::with_capacity(np);
        for i in 0..np {
            let [r1, r2, r3] = pick_distinct(np, i, &mut streams.de_operators);
            let mutant = mutate_rand1(
                &self.pop[r1].vector,
                &self.pop[r2].vector,
                &self.pop[r3].vector,
                self.cfg.f,
                bounds,
            )?;
            challengers.push(crossover_exp(
                &self.pop[i].vector,
                &mutant,
                self.cfg.cr,
                &mut streams.de_operators,
            )?);
        }

        let active = filter.is_active(generation);
        let mut accept = vec![true; np];
        if active {
            for i in 0..np {
                let v = filter.verdict(&self.pop[i], &challengers[i])?;
                let nn = if self.flags.use_diver && !v.accept {
                    diversity_distance(&challengers[i], self.seen.iter().map(Vec::as_slice)).unwrap_or(0.0)
                } else {
                    0.0
                };
                accept[i] = combined_accept(
                    v.accept,
                    self.flags,
                    &self.means,
                    v.quality_gap,
                    nn,
                    &mut streams.strategy_bernoulli,
                );
                self.means = update_means(self.means, Some(v.quality_gap), None);
            }
        }
        let accepted = accept.iter().filter(|a| **a).count();

        let mut queue: Vec<usize> = (0..np).filter(|i| self.shadow || accept[*i]).collect();
        let truncated = queue.len() > self.ledger.remaining();
        queue.truncate(self.ledger.remaining());
        let batch: Vec<Vec<f64>> = queue.iter().map(|i| challengers[*i].clone()).collect();
        let fitness = self.objective.evaluate_batch(&batch, self.cfg.workers)?;

        let mut confusion = self.shadow.then(Confusion::default);
        for (&i, (vector, q)) in queue.iter().zip(batch.into_iter().zip(fitness)) {
            let eval_index = self.book(generation, q, accept[i])?;
            let improves = is_better(q, self.pop[i].fitness)?;
            if let Some(c) = confusion.as_mut() {
                c.record(accept[i], improves);
            }
            if !accept[i] {
                continue;
            }
            let point = EvaluatedSolution {
                vector,
                fitness: q,
                eval_index,
            };
            self.remember(filter, &point)?;
            if improves {
                self.pop[i] = point;
            }
        }
        self.log(generation, accepted, np - accepted, confusion);
        filter.end_generation(generation, &mut streams.learner_training)?;
        Ok(truncated || self.ledger.is_exhausted())
    }
}

fn run(
    cfg: &DEConfig,
    objective: &dyn Objective,
    filter: &mut dyn ChallengerFilter,
    flags: &StrategyFlags,
    streams: &mut RngStreams,
    shadow: bool,
) -> Result<RunRecord> {
    cfg.validate()?;
    flags.validate()?;
    let mut ledger = EvaluationLedger::new(cfg.budget);
    let pop = init_population(cfg, objective, &mut ledger, &mut streams.population_init)?;
    let mut state = State {
        cfg,
        objective,
        flags,
        shadow,
        ledger: EvaluationLedger::new(cfg.budget),
        pop: Vec::new(),
        seen: Vec::new(),
        means: RunningMeans::default(),
        evaluations: Vec::new(),
        generations: Vec::new(),
    };
    for p in &pop {
        state.book(0, p.fitness, true)?;
    }
    for p in &pop {
        state.remember(filter, p)?;
    }
    state.pop = pop;
    state.log(0, cfg.pop_size, 0, shadow.then(Confusion::default));
    filter.end_generation(0, &mut streams.learner_training)?;

    let mut best = best_of(&state.pop).fitness;
    let mut idle = 0;
    let mut generation = 1;
    let termination = loop {
        if state.ledger.is_exhausted() {
            break TerminationReason::Budget;
        }
        let exhausted = state.generation(generation, filter, streams)?;
        let now = best_of(&state.pop).fitness;
        if now < best {
            best = now;
            idle = 0;
        } else {
            idle += 1;
        }
        if exhausted {
            break TerminationReason::Budget;
        }
        if idle >= cfg.no_improvement_limit {
            break TerminationReason::NoImprovement;
        }
        generation += 1;
    };
    Ok(RunRecord {
        best: best_of(&state.pop).clone(),
        evaluations: state.evaluations,
        generations: state.generations,
        termination,
        shadow,
    })
}

/// Runs DE, evaluating only the challengers the filter lets through.
pub fn run_optimization(
    cfg: &DEConfig,
    objective: &dyn Objective,
    filter: &mut dyn ChallengerFilter,
    flags: &StrategyFlags,
    streams: &mut RngStreams,
) -> Result<RunRecord> {
    run(cfg, objective, filter, flags, streams, false)
}

/// Runs DE following the filter's decisions while truly evaluating every
/// challenger, and records per-generation confusion counts.
pub fn run_shadow(
    cfg: &DEConfig,
    objective: &dyn Objective,
    filter: &mut dyn ChallengerFilter,
    flags: &StrategyFlags,
    streams: &mut RngStreams,
) -> Result<RunRecord> {
    run(cfg, objective, filter, flags, streams, true)
}

/// Plain DE with the default settings for `objective`.
pub fn run_plain_de(cfg: &DEConfig, objective: &dyn Objective, streams: &mut RngStreams) -> Result<RunRecord> {
    run_optimization(cfg, objective, &mut AcceptAll, &StrategyFlags::default(), streams)
}
