use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use super::config::{ExperimentConfig, Method, ResolvedConfiguration};
use super::kriging::run_kriging_offline;
use super::store::{
    compare_functions, write_csv, ConfigurationRow, ManifestEntry, ResultStore, RunMode, RunStatus, SUMMARY,
};
use crate::benchmarks::BenchmarkSpec;
use crate::domain::{derive_seed, RngStreams};
use crate::error::{Error, Result};
use crate::optimizer::{run_optimization, run_plain_de, run_shadow, RunRecord, SurrogateFilter};
use crate::surrogate::Approach;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    /// Every configuration in normal mode.
    Run,
    /// Surrogate configurations with every challenger truly evaluated.
    Shadow,
    /// Only the offline Kriging configurations.
    KrigingOffline,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub verb: Verb,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub skip_existing: bool,
    /// Print one line per finished run to stderr.
    pub verbose: bool,
}

impl RunOptions {
    pub fn new(verb: Verb) -> Self {
        RunOptions {
            verb,
            output_dir: None,
            workers: None,
            skip_existing: false,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOutcome {
    pub completed: usize,
    pub skipped: usize,
    pub failed: usize,
}

impl RunOutcome {
    pub fn success(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    function: String,
    config: String,
    runs: usize,
    median: f64,
    mean: f64,
    min: f64,
    max: f64,
}

fn selected(configs: Vec<ResolvedConfiguration>, verb: Verb) -> Result<Vec<ResolvedConfiguration>> {
    let chosen: Vec<_> = configs
        .into_iter()
        .filter(|c| match verb {
            Verb::Run => true,
            Verb::Shadow => c.is_surrogate(),
            Verb::KrigingOffline => matches!(c.method, Method::KrigingOffline { .. }),
        })
        .collect();
    if chosen.is_empty() {
        let what = match verb {
            Verb::Run => "configurations",
            Verb::Shadow => "surrogate configurations for shadow mode",
            Verb::KrigingOffline => "kriging_offline configurations",
        };
        return Err(Error::Config(format!("no {what} to run")));
    }
    Ok(chosen)
}

fn configuration_row(c: &ResolvedConfiguration) -> ConfigurationRow {
    let (warmup, trail, mapping) = match &c.method {
        Method::Surrogate { surrogate, .. } => (
            Some(surrogate.warmup_generations),
            Some(surrogate.trail_size),
            match surrogate.approach {
                Approach::Pairwise => format!("{:?}", surrogate.mapping).to_ascii_lowercase(),
                Approach::Surface => String::new(),
            },
        ),
        _ => (None, None, String::new()),
    };
    ConfigurationRow {
        label: c.label.clone(),
        approach: c.approach.name().into(),
        learner: c.learner_label(),
        strategy: c.strategy_label(),
        warmup,
        trail,
        mapping,
        budget: c.de.budget,
    }
}

/// Runs one (function, configuration, run) cell.
pub fn execute(
    config: &ResolvedConfiguration,
    function: &BenchmarkSpec,
    base_seed: u64,
    run: usize,
    mode: RunMode,
) -> Result<RunRecord> {
    let mut streams = RngStreams::new(derive_seed(base_seed, &function.id), run as u64);
    match (&config.method, mode) {
        (Method::PlainDe, RunMode::Normal) => run_plain_de(&config.de, function, &mut streams),
        (Method::Surrogate { surrogate, flags }, _) => {
            let mut filter = SurrogateFilter::new(surrogate.clone(), function.dim())?;
            match mode {
                RunMode::Normal => run_optimization(&config.de, function, &mut filter, flags, &mut streams),
                RunMode::Shadow => run_shadow(&config.de, function, &mut filter, flags, &mut streams),
            }
        }
        (Method::KrigingOffline { allowance }, RunMode::Normal) => {
            run_kriging_offline(&config.de, function, *allowance, &mut streams)
        }
        _ => Err(Error::Config(format!("`{}` has no shadow mode", config.label))),
    }
}

struct Job<'a> {
    function: &'a BenchmarkSpec,
    config: &'a ResolvedConfiguration,
    run: usize,
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

/// Executes the experiment matrix and writes the result store. Individual
/// run failures are recorded in the manifest and counted in the outcome;
/// only configuration and store errors abort.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    cfg.validate()?;
    let functions = cfg.suite()?;
    let configs = selected(cfg.resolve()?, opts.verb)?;
    let mode = if opts.verb == Verb::Shadow {
        RunMode::Shadow
    } else {
        RunMode::Normal
    };
    let root = opts
        .output_dir
        .clone()
        .unwrap_or_else(|| cfg.experiment.output_dir.clone());
    let workers = opts.workers.unwrap_or(cfg.experiment.workers);
    if workers == 0 {
        return Err(Error::Config("workers must be >= 1".into()));
    }
    let base_seed = cfg.experiment.base_seed;

    let store = ResultStore::create(root)?;
    let rows: Vec<ConfigurationRow> = configs.iter().map(configuration_row).collect();
    store.write_configurations(&rows)?;

    let mut outcome = RunOutcome::default();
    let mut jobs = Vec::new();
    for function in &functions {
        for config in &configs {
            for run in 0..cfg.experiment.repetitions {
                if opts.skip_existing && store.is_done(&function.id, &config.label, run, mode) {
                    outcome.skipped += 1;
                } else {
                    jobs.push(Job { function, config, run });
                }
            }
        }
    }

    let store = Mutex::new(store);
    let outcome = Mutex::new(outcome);
    let next = AtomicUsize::new(0);
    let first_error: Mutex<Option<Error>> = Mutex::new(None);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(job) = jobs.get(i) else { break };
        if first_error.lock().unwrap().is_some() {
            break;
        }
        let file = ResultStore::run_file(&job.function.id, &job.config.slug, job.run, mode);
        let result = catch_unwind(AssertUnwindSafe(|| {
            execute(job.config, job.function, base_seed, job.run, mode)
        }))
        .unwrap_or_else(|p| Err(Error::InvalidInput(format!("run panicked: {}", panic_message(p)))));
        let mut entry = ManifestEntry {
            function: job.function.id.clone(),
            config: job.config.label.clone(),
            run: job.run,
            mode,
            status: RunStatus::Failed,
            termination: None,
            evaluations: None,
            generations: None,
            final_best: None,
            file: String::new(),
            message: String::new(),
        };
        let mut store = store.lock().unwrap();
        match result.and_then(|rec| store.write_run(&file, &rec).map(|()| rec)) {
            Ok(rec) => {
                entry.status = RunStatus::Done;
                entry.termination = Some(rec.termination);
                entry.evaluations = Some(rec.evaluations_used());
                entry.generations = Some(rec.generations.len());
                entry.final_best = Some(rec.final_best());
                entry.file = file;
                outcome.lock().unwrap().completed += 1;
            }
            Err(e) => {
                entry.message = e.to_string();
                outcome.lock().unwrap().failed += 1;
            }
        }
        if opts.verbose {
            eprintln!(
                "{} {} run {}: {}",
                entry.function,
                entry.config,
                entry.run,
                match entry.status {
                    RunStatus::Done => format!("{:.6e}", entry.final_best.unwrap_or(f64::NAN)),
                    RunStatus::Failed => format!("failed: {}", entry.message),
                }
            );
        }
        if let Err(e) = store.record(entry) {
            first_error.lock().unwrap().get_or_insert(e);
        }
    };
    std::thread::scope(|scope| {
        for _ in 1..workers.min(jobs.len()) {
            scope.spawn(work);
        }
        work();
    });
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    let store = store.into_inner().unwrap();
    write_summary(&store)?;
    Ok(outcome.into_inner().unwrap())
}

fn write_summary(store: &ResultStore) -> Result<()> {
    let mut groups: Vec<(String, String, Vec<f64>)> = Vec::new();
    for e in store.entries() {
        let (RunMode::Normal, RunStatus::Done, Some(v)) = (e.mode, e.status, e.final_best) else {
            continue;
        };
        match groups.last_mut() {
            Some((f, c, vals)) if *f == e.function && *c == e.config => vals.push(v),
            _ => groups.push((e.function.clone(), e.config.clone(), vec![v])),
        }
    }
    groups.sort_by(|a, b| compare_functions(&a.0, &b.0).then_with(|| a.1.cmp(&b.1)));
    let rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|(function, config, vals)| SummaryRow {
            function,
            config,
            runs: vals.len(),
            median: median(&vals),
            mean: vals.iter().sum::<f64>() / vals.len() as f64,
            min: vals.iter().copied().fold(f64::INFINITY, f64::min),
            max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    write_csv(&store.root().join(SUMMARY), &rows)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
