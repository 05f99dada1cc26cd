use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::domain::EvaluatedSolution;
use crate::error::{Error, Result};
use crate::optimizer::{Confusion, EvaluationRecord, GenerationLog, RunRecord, TerminationReason};

pub const MANIFEST: &str = "manifest.csv";
pub const CONFIGURATIONS: &str = "configurations.csv";
pub const SUMMARY: &str = "summary.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Normal,
    Shadow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub function: String,
    pub config: String,
    pub run: usize,
    pub mode: RunMode,
    pub status: RunStatus,
    pub termination: Option<TerminationReason>,
    pub evaluations: Option<usize>,
    pub generations: Option<usize>,
    pub final_best: Option<f64>,
    pub file: String,
    pub message: String,
}

/// One row of `configurations.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationRow {
    pub label: String,
    pub approach: String,
    pub learner: String,
    pub strategy: String,
    pub warmup: Option<usize>,
    pub trail: Option<usize>,
    pub mapping: String,
    pub budget: usize,
}

/// One row of a per-run file. `eval` rows describe a true evaluation,
/// `gen` rows the state at the end of a generation, and the single `best`
/// row the final solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunRow {
    record: String,
    generation: Option<usize>,
    evaluations: usize,
    fitness: Option<f64>,
    best_fitness: Option<f64>,
    accepted: Option<usize>,
    discarded: Option<usize>,
    tp: Option<u64>,
    fp: Option<u64>,
    tn: Option<u64>,
    #[serde(rename = "fn")]
    fn_: Option<u64>,
}

impl RunRow {
    fn empty(record: &str, evaluations: usize) -> Self {
        RunRow {
            record: record.into(),
            generation: None,
            evaluations,
            fitness: None,
            best_fitness: None,
            accepted: None,
            discarded: None,
            tp: None,
            fp: None,
            tn: None,
            fn_: None,
        }
    }
}

fn function_key(id: &str) -> (String, u64, String) {
    let digits = id.len() - id.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (prefix, number) = id.split_at(id.len() - digits);
    (prefix.to_string(), number.parse().unwrap_or(0), id.to_string())
}

/// Natural order on function ids, so `F2` sorts before `F10`.
pub fn compare_functions(a: &str, b: &str) -> Ordering {
    function_key(a).cmp(&function_key(b))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::file(parent, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::file(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::file(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::file(
        path,
        std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
    )
}

/// Serialises rows to CSV bytes with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::InvalidInput(format!("csv serialisation: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv serialisation: {e}")))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_atomic(path, &to_csv(rows)?)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| csv_error(path, e))
}

/// Directory of per-run files indexed by `manifest.csv`.
#[derive(Debug, Clone)]
pub struct ResultStore {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ResultStore {
    /// Opens (creating if needed) a store directory.
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::file(&root, e))?;
        Self::load(root)
    }

    /// Opens an existing store.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        if !root.join(MANIFEST).is_file() {
            return Err(Error::Report(format!("{} holds no {MANIFEST}", root.display())));
        }
        Self::load(root)
    }

    fn load(root: PathBuf) -> Result<Self> {
        let path = root.join(MANIFEST);
        let entries = if path.is_file() { read_csv(&path)? } else { Vec::new() };
        Ok(ResultStore { root, entries })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn find(&self, function: &str, config: &str, run: usize, mode: RunMode) -> Option<&ManifestEntry> {
        self.entries
            .iter()
            .find(|e| e.function == function && e.config == config && e.run == run && e.mode == mode)
    }

    /// True when the run finished and its file is still present.
    pub fn is_done(&self, function: &str, config: &str, run: usize, mode: RunMode) -> bool {
        self.find(function, config, run, mode)
            .is_some_and(|e| e.status == RunStatus::Done && self.root.join(&e.file).is_file())
    }

    pub fn run_file(function: &str, slug: &str, run: usize, mode: RunMode) -> String {
        let stem = match mode {
            RunMode::Normal => "run",
            RunMode::Shadow => "shadow",
        };
        format!("runs/{function}/{slug}/{stem}_{run:03}.csv")
    }

    /// Inserts or replaces the entry for its (function, config, run, mode)
    /// and rewrites the manifest.
    pub fn record(&mut self, entry: ManifestEntry) -> Result<()> {
        self.entries.retain(|e| {
            !(e.function == entry.function && e.config == entry.config && e.run == entry.run && e.mode == entry.mode)
        });
        self.entries.push(entry);
        self.entries.sort_by(|a, b| {
            compare_functions(&a.function, &b.function)
                .then_with(|| a.config.cmp(&b.config))
                .then(a.run.cmp(&b.run))
                .then(a.mode.cmp(&b.mode))
        });
        write_csv(&self.root.join(MANIFEST), &self.entries)
    }

    pub fn write_run(&self, file: &str, record: &RunRecord) -> Result<()> {
        let mut rows = Vec::with_capacity(record.evaluations.len() + record.generations.len() + 1);
        for e in &record.evaluations {
            rows.push(RunRow {
                generation: Some(e.generation),
                fitness: Some(e.fitness),
                best_fitness: Some(e.best_fitness),
                accepted: Some(usize::from(e.accepted)),
                ..RunRow::empty("eval", e.evaluations)
            });
        }
        for g in &record.generations {
            let c = g.confusion;
            rows.push(RunRow {
                generation: Some(g.generation),
                best_fitness: Some(g.best_fitness),
                accepted: Some(g.accepted),
                discarded: Some(g.discarded),
                tp: c.map(|c| c.tp),
                fp: c.map(|c| c.fp),
                tn: c.map(|c| c.tn),
                fn_: c.map(|c| c.fn_),
                ..RunRow::empty("gen", g.evaluations)
            });
        }
        rows.push(RunRow {
            fitness: Some(record.best.fitness),
            ..RunRow::empty("best", record.best.eval_index)
        });
        write_csv(&self.root.join(file), &rows)
    }

    /// Rebuilds a finished run. The final solution vector is not stored.
    pub fn read_run(&self, entry: &ManifestEntry) -> Result<RunRecord> {
        if entry.status != RunStatus::Done {
            return Err(Error::Report(format!(
                "run {}/{}/{} did not finish",
                entry.function, entry.config, entry.run
            )));
        }
        let path = self.root.join(&entry.file);
        let rows: Vec<RunRow> = read_csv(&path)?;
        let bad = |what: &str| Error::Report(format!("{}: malformed {what} row", path.display()));
        let mut record = RunRecord {
            evaluations: Vec::new(),
            generations: Vec::new(),
            termination: entry.termination.ok_or_else(|| bad("manifest"))?,
            best: EvaluatedSolution {
                vector: Vec::new(),
                fitness: f64::NAN,
                eval_index: 0,
            },
            shadow: entry.mode == RunMode::Shadow,
        };
        for r in rows {
            match r.record.as_str() {
                "eval" => record.evaluations.push(EvaluationRecord {
                    generation: r.generation.ok_or_else(|| bad("eval"))?,
                    evaluations: r.evaluations,
                    fitness: r.fitness.ok_or_else(|| bad("eval"))?,
                    best_fitness: r.best_fitness.ok_or_else(|| bad("eval"))?,
                    accepted: r.accepted.ok_or_else(|| bad("eval"))? == 1,
                }),
                "gen" => {
                    let confusion = match (r.tp, r.fp, r.tn, r.fn_) {
                        (Some(tp), Some(fp), Some(tn), Some(fn_)) => Some(Confusion { tp, fp, tn, fn_ }),
                        (None, None, None, None) => None,
                        _ => return Err(bad("gen")),
                    };
                    record.generations.push(GenerationLog {
                        generation: r.generation.ok_or_else(|| bad("gen"))?,
                        evaluations: r.evaluations,
                        best_fitness: r.best_fitness.ok_or_else(|| bad("gen"))?,
                        accepted: r.accepted.ok_or_else(|| bad("gen"))?,
                        discarded: r.discarded.ok_or_else(|| bad("gen"))?,
                        confusion,
                    });
                }
                "best" => {
                    record.best.fitness = r.fitness.ok_or_else(|| bad("best"))?;
                    record.best.eval_index = r.evaluations;
                }
                _ => return Err(bad("unknown")),
            }
        }
        if record.best.fitness.is_nan() {
            return Err(bad("best"));
        }
        Ok(record)
    }

    /// Merges configuration descriptions into `configurations.csv`: rows with
    /// a known label are replaced, new labels are appended.
    pub fn write_configurations(&self, rows: &[ConfigurationRow]) -> Result<()> {
        let mut all = self.configurations()?;
        for row in rows {
            match all.iter_mut().find(|r| r.label == row.label) {
                Some(slot) => *slot = row.clone(),
                None => all.push(row.clone()),
            }
        }
        write_csv(&self.root.join(CONFIGURATIONS), &all)
    }

    pub fn configurations(&self) -> Result<Vec<ConfigurationRow>> {
        let path = self.root.join(CONFIGURATIONS);
        if path.is_file() {
            read_csv(&path)
        } else {
            Ok(Vec::new())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record(shadow: bool) -> RunRecord {
        RunRecord {
            evaluations: vec![
                EvaluationRecord {
                    generation: 0,
                    evaluations: 1,
                    fitness: 3.5,
                    best_fitness: 3.5,
                    accepted: true,
                },
                EvaluationRecord {
                    generation: 1,
                    evaluations: 2,
                    fitness: 0.1 + 0.2,
                    best_fitness: 0.1 + 0.2,
                    accepted: false,
                },
            ],
            generations: vec![
                GenerationLog {
                    generation: 0,
                    evaluations: 1,
                    best_fitness: 3.5,
                    accepted: 0,
                    discarded: 0,
                    confusion: None,
                },
                GenerationLog {
                    generation: 1,
                    evaluations: 2,
                    best_fitness: 0.1 + 0.2,
                    accepted: 0,
                    discarded: 1,
                    confusion: shadow.then_some(Confusion {
                        tp: 0,
                        fp: 0,
                        tn: 0,
                        fn_: 1,
                    }),
                },
            ],
            termination: TerminationReason::Budget,
            best: EvaluatedSolution {
                vector: Vec::new(),
                fitness: 0.1 + 0.2,
                eval_index: 2,
            },
            shadow,
        }
    }

    fn entry(function: &str, run: usize, mode: RunMode, file: &str) -> ManifestEntry {
        ManifestEntry {
            function: function.into(),
            config: "DE".into(),
            run,
            mode,
            status: RunStatus::Done,
            termination: Some(TerminationReason::Budget),
            evaluations: Some(2),
            generations: Some(2),
            final_best: Some(0.1 + 0.2),
            file: file.into(),
            message: String::new(),
        }
    }

    #[test]
    fn run_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = ResultStore::create(dir.path()).unwrap();
        for shadow in [false, true] {
            let mode = if shadow { RunMode::Shadow } else { RunMode::Normal };
            let file = ResultStore::run_file("F1", "DE", 0, mode);
            let rec = sample_record(shadow);
            store.write_run(&file, &rec).unwrap();
            let e = entry("F1", 0, mode, &file);
            store.record(e.clone()).unwrap();
            assert_eq!(store.read_run(&e).unwrap(), rec);
        }
        assert!(store.is_done("F1", "DE", 0, RunMode::Shadow));
        assert!(!store.is_done("F1", "DE", 1, RunMode::Normal));
        let reopened = ResultStore::open(dir.path()).unwrap();
        assert_eq!(reopened.entries(), store.entries());
    }

    #[test]
    fn manifest_is_sorted_and_unique() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = ResultStore::create(dir.path()).unwrap();
        for (f, r) in [("F10", 0), ("F2", 1), ("F2", 0), ("F10", 0)] {
            store.record(entry(f, r, RunMode::Normal, "x")).unwrap();
        }
        let keys: Vec<(String, usize)> = store.entries().iter().map(|e| (e.function.clone(), e.run)).collect();
        assert_eq!(
            keys,
            [("F2".to_string(), 0), ("F2".to_string(), 1), ("F10".to_string(), 0)]
        );
        let text = fs::read_to_string(dir.path().join(MANIFEST)).unwrap();
        assert!(text.starts_with(
            "function,config,run,mode,status,termination,evaluations,generations,final_best,file,message\n"
        ));
    }

    #[test]
    fn open_requires_manifest() {
        let dir = tempfile::tempdir().unwrap();
        assert!(ResultStore::open(dir.path()).is_err());
    }

    #[test]
    fn configurations_merge() {
        let dir = tempfile::tempdir().unwrap();
        let store = ResultStore::create(dir.path()).unwrap();
        let row = |label: &str, budget| ConfigurationRow {
            label: label.into(),
            approach: "none".into(),
            learner: String::new(),
            strategy: String::new(),
            warmup: None,
            trail: None,
            mapping: String::new(),
            budget,
        };
        store.write_configurations(&[row("DE", 750), row("B", 1)]).unwrap();
        store.write_configurations(&[row("DE", 3000)]).unwrap();
        let rows = store.configurations().unwrap();
        assert_eq!(rows, vec![row("DE", 3000), row("B", 1)]);
    }

    #[test]
    fn natural_function_order() {
        assert_eq!(compare_functions("F2", "F10"), Ordering::Less);
        assert_eq!(compare_functions("F10", "F10"), Ordering::Equal);
        assert_eq!(compare_functions("G1", "F9"), Ordering::Greater);
    }
}
