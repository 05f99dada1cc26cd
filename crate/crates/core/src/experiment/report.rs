use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use super::run::median;
use super::store::{compare_functions, ConfigurationRow, ManifestEntry, ResultStore, RunMode, RunStatus};
use crate::error::{Error, Result};
use crate::metrics::{confusion_rates, delta_e, delta_e_ratio, zeta_series, Curve};
use crate::optimizer::{Confusion, RunRecord};
use crate::stats::{average_ranking, friedman_test, holm_correction, mid_ranks, wilcoxon_signed_rank, ResultMatrix};

pub const DEFAULT_ZETA_WINDOW: usize = 40;
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Ranking,
    Stats,
    Heatmap,
    DeltaE,
    Confusion,
    Zeta,
    All,
}

impl FromStr for ReportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ranking" => ReportKind::Ranking,
            "stats" => ReportKind::Stats,
            "heatmap" => ReportKind::Heatmap,
            "delta_e" => ReportKind::DeltaE,
            "confusion" => ReportKind::Confusion,
            "zeta" => ReportKind::Zeta,
            "all" => ReportKind::All,
            _ => return Err(Error::Report(format!("unknown report kind `{s}`"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Plain-DE configuration the δe report compares against. Defaults to
    /// the `none` configuration with the largest budget.
    pub baseline: Option<String>,
    /// Configurations to rank; all configurations with normal runs when
    /// `None`.
    pub configs: Option<Vec<String>>,
    pub zeta_window: usize,
    /// Defaults to `<store>/reports`.
    pub out_dir: Option<PathBuf>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            baseline: None,
            configs: None,
            zeta_window: DEFAULT_ZETA_WINDOW,
            out_dir: None,
        }
    }
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        v.to_string()
    }
}

fn opt<T: Display>(v: Option<T>) -> String {
    v.map_or_else(|| "NA".into(), |v| v.to_string())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Report(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.into_inner().map_err(|e| Error::Report(e.to_string()))
    }
}

/// Everything a report needs from a store, loaded once.
struct Loaded {
    store: ResultStore,
    configurations: Vec<ConfigurationRow>,
}

impl Loaded {
    fn done(&self, mode: RunMode) -> impl Iterator<Item = &ManifestEntry> {
        self.store
            .entries()
            .iter()
            .filter(move |e| e.mode == mode && e.status == RunStatus::Done)
    }

    fn config_order(&self, label: &str) -> usize {
        self.configurations
            .iter()
            .position(|c| c.label == label)
            .unwrap_or(usize::MAX)
    }

    fn describe(&self, label: &str) -> Option<&ConfigurationRow> {
        self.configurations.iter().find(|c| c.label == label)
    }

    /// Configuration labels with normal runs, in configuration-file order.
    fn normal_configs(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for e in self.done(RunMode::Normal) {
            if !labels.contains(&e.config) {
                labels.push(e.config.clone());
            }
        }
        labels.sort_by_key(|l| (self.config_order(l), l.clone()));
        labels
    }

    fn functions(&self, mode: RunMode) -> Vec<String> {
        let mut f: Vec<String> = Vec::new();
        for e in self.done(mode) {
            if !f.contains(&e.function) {
                f.push(e.function.clone());
            }
        }
        f.sort_by(|a, b| compare_functions(a, b));
        f
    }

    /// Per-function medians of the final best fitness, functions × configs.
    fn medians(&self, configs: &[String]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
        let mut finals: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
        for e in self.done(RunMode::Normal) {
            if let Some(v) = e.final_best {
                finals
                    .entry((e.function.as_str(), e.config.as_str()))
                    .or_default()
                    .push(v);
            }
        }
        let functions = self.functions(RunMode::Normal);
        let mut values = Vec::new();
        for f in &functions {
            let mut row = Vec::new();
            for c in configs {
                let runs = finals
                    .get(&(f.as_str(), c.as_str()))
                    .ok_or_else(|| Error::Report(format!("no finished runs for {f} / {c}")))?;
                row.push(median(runs));
            }
            values.push(row);
        }
        Ok((functions, values))
    }

    fn ranked_configs(&self, opts: &ReportOptions) -> Result<Vec<String>> {
        let all = self.normal_configs();
        let configs = match &opts.configs {
            None => all,
            Some(wanted) => {
                for w in wanted {
                    if !all.contains(w) {
                        return Err(Error::Report(format!("no finished runs for configuration `{w}`")));
                    }
                }
                all.into_iter().filter(|c| wanted.contains(c)).collect()
            }
        };
        if configs.is_empty() {
            return Err(Error::Report("the store holds no finished runs".into()));
        }
        Ok(configs)
    }

    fn read(&self, e: &ManifestEntry) -> Result<RunRecord> {
        self.store.read_run(e)
    }
}

struct Ranking {
    configs: Vec<String>,
    functions: Vec<String>,
    medians: Vec<Vec<f64>>,
    mean_ranks: Vec<f64>,
}

impl Ranking {
    fn compute(loaded: &Loaded, opts: &ReportOptions) -> Result<Self> {
        let configs = loaded.ranked_configs(opts)?;
        let (functions, medians) = loaded.medians(&configs)?;
        let mut sums = vec![0.0; configs.len()];
        for row in &medians {
            for (s, r) in sums.iter_mut().zip(mid_ranks(row)) {
                *s += r;
            }
        }
        let mean_ranks = sums.iter().map(|s| s / functions.len() as f64).collect();
        Ok(Ranking {
            configs,
            functions,
            medians,
            mean_ranks,
        })
    }

    /// Column indices sorted ascending by mean rank.
    fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.configs.len()).collect();
        idx.sort_by(|a, b| self.mean_ranks[*a].total_cmp(&self.mean_ranks[*b]));
        idx
    }

    fn matrix(&self) -> Result<ResultMatrix> {
        ResultMatrix::new(self.functions.clone(), self.configs.clone(), self.medians.clone())
    }
}

fn ranking_tables(loaded: &Loaded, r: &Ranking) -> Vec<(&'static str, Table)> {
    let mut ranking = Table::new(&["position", "config", "learner", "strategy", "mean_rank", "functions"]);
    for (pos, &j) in r.order().iter().enumerate() {
        let d = loaded.describe(&r.configs[j]);
        ranking.push(vec![
            (pos + 1).to_string(),
            r.configs[j].clone(),
            d.map(|d| d.learner.clone()).unwrap_or_default(),
            d.map(|d| d.strategy.clone()).unwrap_or_default(),
            num(r.mean_ranks[j]),
            r.functions.len().to_string(),
        ]);
    }
    let mut header = vec!["function"];
    header.extend(r.configs.iter().map(String::as_str));
    let mut by_function = Table::new(&header);
    let mut medians = Table::new(&header);
    for (f, row) in r.functions.iter().zip(&r.medians) {
        let mut ranks = vec![f.clone()];
        ranks.extend(mid_ranks(row).into_iter().map(num));
        by_function.push(ranks);
        let mut m = vec![f.clone()];
        m.extend(row.iter().map(|v| num(*v)));
        medians.push(m);
    }
    vec![
        ("ranking.csv", ranking),
        ("ranks_by_function.csv", by_function),
        ("medians.csv", medians),
    ]
}

fn stats_tables(r: &Ranking) -> Result<Vec<(&'static str, Table)>> {
    let matrix = r
        .matrix()
        .map_err(|e| Error::Report(format!("stats need >= 2 functions and configurations: {e}")))?;
    let (statistic, p) = friedman_test(&matrix)?;
    let mut friedman = Table::new(&["configs", "functions", "statistic", "p_value", "significant"]);
    friedman.push(vec![
        r.configs.len().to_string(),
        r.functions.len().to_string(),
        num(statistic),
        num(p),
        if p < ALPHA { "*".into() } else { String::new() },
    ]);

    let mean_ranks = average_ranking(&matrix);
    let order = r.order();
    let control = order[0];
    let control_values = matrix.column(control);
    let mut tests = Vec::new();
    for &j in &order[1..] {
        tests.push((j, wilcoxon_signed_rank(&matrix.column(j), &control_values).ok()));
    }
    let raw: Vec<f64> = tests.iter().filter_map(|(_, w)| w.map(|w| w.p_value)).collect();
    let mut adjusted = holm_correction(&raw)?.into_iter();
    let mut table = Table::new(&[
        "config",
        "mean_rank",
        "control",
        "statistic",
        "n",
        "exact",
        "p_value",
        "p_holm",
        "significant",
    ]);
    table.push(vec![
        r.configs[control].clone(),
        num(mean_ranks[control]),
        r.configs[control].clone(),
        "NA".into(),
        "NA".into(),
        "NA".into(),
        "NA".into(),
        "NA".into(),
        String::new(),
    ]);
    for (j, w) in tests {
        let mut row = vec![r.configs[j].clone(), num(mean_ranks[j]), r.configs[control].clone()];
        match w {
            Some(w) => {
                let holm = adjusted.next().expect("one adjusted p-value per test");
                row.extend([
                    num(w.statistic),
                    w.n.to_string(),
                    w.exact.to_string(),
                    num(w.p_value),
                    num(holm),
                    if holm < ALPHA { "*".into() } else { String::new() },
                ]);
            }
            None => row.extend(["NA", "NA", "NA", "NA", "NA", ""].map(String::from)),
        }
        table.push(row);
    }
    Ok(vec![("friedman.csv", friedman), ("stats.csv", table)])
}

fn heatmap_table(loaded: &Loaded, r: &Ranking) -> Result<Table> {
    let mut learners: Vec<String> = Vec::new();
    let mut strategies: Vec<String> = Vec::new();
    for c in &r.configs {
        if let Some(d) = loaded.describe(c).filter(|d| !d.learner.is_empty()) {
            if !learners.contains(&d.learner) {
                learners.push(d.learner.clone());
            }
            if !strategies.contains(&d.strategy) {
                strategies.push(d.strategy.clone());
            }
        }
    }
    if learners.is_empty() {
        return Err(Error::Report("heat map needs surrogate configurations".into()));
    }
    let mut cells: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for (li, learner) in learners.iter().enumerate() {
        let block: Vec<usize> = (0..r.configs.len())
            .filter(|&j| loaded.describe(&r.configs[j]).is_some_and(|d| &d.learner == learner))
            .collect();
        let mut sums = vec![0.0; block.len()];
        for row in &r.medians {
            let vals: Vec<f64> = block.iter().map(|&j| row[j]).collect();
            for (s, rank) in sums.iter_mut().zip(mid_ranks(&vals)) {
                *s += rank;
            }
        }
        for (k, &j) in block.iter().enumerate() {
            let strategy = &loaded.describe(&r.configs[j]).expect("described").strategy;
            let si = strategies.iter().position(|s| s == strategy).expect("collected");
            cells
                .entry((li, si))
                .or_default()
                .push(sums[k] / r.functions.len() as f64);
        }
    }
    let mut header = vec!["learner"];
    header.extend(strategies.iter().map(String::as_str));
    let mut table = Table::new(&header);
    for (li, learner) in learners.iter().enumerate() {
        let mut row = vec![learner.clone()];
        for si in 0..strategies.len() {
            row.push(match cells.get(&(li, si)) {
                Some(v) => num(v.iter().sum::<f64>() / v.len() as f64),
                None => "NA".into(),
            });
        }
        table.push(row);
    }
    Ok(table)
}

fn default_baseline(loaded: &Loaded) -> Result<String> {
    let available = loaded.normal_configs();
    loaded
        .configurations
        .iter()
        .filter(|c| c.approach == "none" && available.contains(&c.label))
        .fold(None::<&ConfigurationRow>, |best, c| match best {
            Some(b) if b.budget >= c.budget => Some(b),
            _ => Some(c),
        })
        .map(|c| c.label.clone())
        .ok_or_else(|| Error::Report("δe needs a plain-DE baseline; pass --baseline".into()))
}

fn delta_e_tables(loaded: &Loaded, opts: &ReportOptions) -> Result<Vec<(&'static str, Table)>> {
    let baseline = match &opts.baseline {
        Some(b) => b.clone(),
        None => default_baseline(loaded)?,
    };
    let entries: Vec<&ManifestEntry> = loaded.done(RunMode::Normal).collect();
    if !entries.iter().any(|e| e.config == baseline) {
        return Err(Error::Report(format!("baseline `{baseline}` has no finished runs")));
    }
    let configs: Vec<String> = loaded
        .ranked_configs(opts)?
        .into_iter()
        .filter(|c| *c != baseline)
        .collect();
    let mut runs = Table::new(&["function", "config", "run", "n", "m", "delta_e", "ratio", "censored"]);
    let mut summary: BTreeMap<(usize, String), (String, Vec<f64>, Vec<f64>, usize)> = BTreeMap::new();
    for e in &entries {
        let Some(ci) = configs.iter().position(|c| *c == e.config) else {
            continue;
        };
        let Some(b) = entries
            .iter()
            .find(|b| b.config == baseline && b.function == e.function && b.run == e.run)
        else {
            continue;
        };
        let surrogate = Curve::from_run(&loaded.read(e)?);
        let reference = Curve::from_run(&loaded.read(b)?);
        let d = delta_e(&surrogate, &reference, surrogate.last_evaluation())?;
        let ratio = delta_e_ratio(d.n, d.m)?;
        runs.push(vec![
            e.function.clone(),
            e.config.clone(),
            e.run.to_string(),
            d.n.to_string(),
            d.m.to_string(),
            d.value.to_string(),
            num(ratio),
            d.censored.to_string(),
        ]);
        for key in [e.function.clone(), "ALL".to_string()] {
            let slot = summary
                .entry((ci, key))
                .or_insert_with(|| (e.config.clone(), Vec::new(), Vec::new(), 0));
            slot.1.push(d.value as f64);
            slot.2.push(ratio);
            slot.3 += usize::from(d.censored);
        }
    }
    let mut table = Table::new(&[
        "config",
        "function",
        "baseline",
        "runs",
        "mean_delta_e",
        "median_delta_e",
        "mean_ratio",
        "median_ratio",
        "censored",
    ]);
    let mut keys: Vec<&(usize, String)> = summary.keys().collect();
    keys.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| match (a.1.as_str(), b.1.as_str()) {
            ("ALL", "ALL") => std::cmp::Ordering::Equal,
            ("ALL", _) => std::cmp::Ordering::Greater,
            (_, "ALL") => std::cmp::Ordering::Less,
            (x, y) => compare_functions(x, y),
        })
    });
    for key in keys {
        let (config, values, ratios, censored) = &summary[key];
        table.push(vec![
            config.clone(),
            key.1.clone(),
            baseline.clone(),
            values.len().to_string(),
            num(values.iter().sum::<f64>() / values.len() as f64),
            num(median(values)),
            num(ratios.iter().sum::<f64>() / ratios.len() as f64),
            num(median(ratios)),
            censored.to_string(),
        ]);
    }
    Ok(vec![("delta_e.csv", runs), ("delta_e_summary.csv", table)])
}

fn confusion_tables(loaded: &Loaded) -> Result<Vec<(&'static str, Table)>> {
    let entries: Vec<&ManifestEntry> = loaded.done(RunMode::Shadow).collect();
    if entries.is_empty() {
        return Err(Error::Report(
            "the confusion report needs shadow runs; run the `shadow` verb first".into(),
        ));
    }
    let header = [
        "function",
        "config",
        "run",
        "generation",
        "tp",
        "fp",
        "tn",
        "fn",
        "accuracy",
        "sensitivity",
        "specificity",
    ];
    let mut series = Table::new(&header);
    let mut totals = Table::new(&header);
    for e in entries {
        let rec = loaded.read(e)?;
        let row = |table: &mut Table, generation: String, c: Confusion| {
            let rates = confusion_rates(c.tp, c.fp, c.tn, c.fn_);
            table.push(vec![
                e.function.clone(),
                e.config.clone(),
                e.run.to_string(),
                generation,
                c.tp.to_string(),
                c.fp.to_string(),
                c.tn.to_string(),
                c.fn_.to_string(),
                opt(rates.accuracy),
                opt(rates.sensitivity),
                opt(rates.specificity),
            ]);
        };
        for g in &rec.generations {
            if let Some(c) = g.confusion {
                row(&mut series, g.generation.to_string(), c);
            }
        }
        if let Some(c) = rec.confusion_total() {
            row(&mut totals, "ALL".into(), c);
        }
    }
    Ok(vec![("confusion.csv", series), ("confusion_summary.csv", totals)])
}

fn zeta_table(loaded: &Loaded, opts: &ReportOptions) -> Result<Table> {
    if opts.zeta_window == 0 {
        return Err(Error::Report("zeta window must be >= 1".into()));
    }
    let configs = loaded.ranked_configs(opts)?;
    let mut table = Table::new(&["function", "config", "run", "generation", "evaluations", "zeta"]);
    for e in loaded.done(RunMode::Normal).filter(|e| configs.contains(&e.config)) {
        let rec = loaded.read(e)?;
        for (i, z) in zeta_series(&rec, opts.zeta_window).into_iter().enumerate() {
            let g = &rec.generations[i + 1];
            table.push(vec![
                e.function.clone(),
                e.config.clone(),
                e.run.to_string(),
                g.generation.to_string(),
                g.evaluations.to_string(),
                opt(z),
            ]);
        }
    }
    Ok(table)
}

/// Writes the requested tables and returns their paths in write order.
pub fn report(store_dir: impl Into<PathBuf>, kind: ReportKind, opts: &ReportOptions) -> Result<Vec<PathBuf>> {
    let store = ResultStore::open(store_dir)?;
    let configurations = store.configurations()?;
    let loaded = Loaded { store, configurations };
    let out = opts
        .out_dir
        .clone()
        .unwrap_or_else(|| loaded.store.root().join("reports"));

    let all = kind == ReportKind::All;
    let mut tables: Vec<(&'static str, Table)> = Vec::new();
    let needs_ranking = matches!(
        kind,
        ReportKind::Ranking | ReportKind::Stats | ReportKind::Heatmap | ReportKind::All
    );
    let ranking = if needs_ranking {
        Some(Ranking::compute(&loaded, opts)?)
    } else {
        None
    };
    if let Some(r) = &ranking {
        if matches!(kind, ReportKind::Ranking | ReportKind::All) {
            tables.extend(ranking_tables(&loaded, r));
        }
        if kind == ReportKind::Stats || (all && r.functions.len() >= 2 && r.configs.len() >= 2) {
            tables.extend(stats_tables(r)?);
        }
        let has_surrogates = r
            .configs
            .iter()
            .any(|c| loaded.describe(c).is_some_and(|d| !d.learner.is_empty()));
        if kind == ReportKind::Heatmap || (all && has_surrogates) {
            tables.push(("heatmap.csv", heatmap_table(&loaded, r)?));
        }
    }
    if kind == ReportKind::DeltaE || (all && (opts.baseline.is_some() || default_baseline(&loaded).is_ok())) {
        tables.extend(delta_e_tables(&loaded, opts)?);
    }
    if kind == ReportKind::Confusion || (all && loaded.done(RunMode::Shadow).next().is_some()) {
        tables.extend(confusion_tables(&loaded)?);
    }
    if matches!(kind, ReportKind::Zeta | ReportKind::All) {
        tables.push(("zeta.csv", zeta_table(&loaded, opts)?));
    }

    fs::create_dir_all(&out).map_err(|e| Error::file(&out, e))?;
    let mut written = Vec::new();
    for (name, table) in tables {
        let path = out.join(name);
        fs::write(&path, table.bytes()?).map_err(|e| Error::file(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ExperimentConfig;
    use crate::experiment::run::{run_experiment, RunOptions, Verb};

    const CONFIG: &str = r#"
schema_version = 1
[suite]
dim = 5
functions = ["F1", "F3"]
[experiment]
repetitions = 2
budget_multiplier = 20
[[configuration]]
label = "DE"
approach = "none"
[[configuration]]
label = "Ridge/R"
approach = "surface"
learner = "ridge"
warmup = 2
[[configuration]]
label = "Ridge/R Diver"
approach = "surface"
learner = "ridge"
warmup = 2
strategies = ["diver"]
"#;

    fn store() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::parse(CONFIG).unwrap();
        let opts = RunOptions {
            output_dir: Some(dir.path().into()),
            ..RunOptions::new(Verb::Run)
        };
        assert!(run_experiment(&cfg, &opts).unwrap().success());
        dir
    }

    fn read(dir: &tempfile::TempDir, name: &str) -> String {
        fs::read_to_string(dir.path().join("reports").join(name)).unwrap()
    }

    #[test]
    fn ranking_is_sorted_and_reports_are_deterministic() {
        let dir = store();
        let written = report(dir.path(), ReportKind::All, &ReportOptions::default()).unwrap();
        let snapshot: Vec<Vec<u8>> = written.iter().map(|p| fs::read(p).unwrap()).collect();
        let again = report(dir.path(), ReportKind::All, &ReportOptions::default()).unwrap();
        assert_eq!(written, again);
        for (p, bytes) in again.iter().zip(snapshot) {
            assert_eq!(fs::read(p).unwrap(), bytes);
        }

        let ranking = read(&dir, "ranking.csv");
        let ranks: Vec<f64> = ranking
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
            .collect();
        assert_eq!(ranks.len(), 3);
        assert!(ranks.windows(2).all(|w| w[0] <= w[1]));
        assert!((ranks.iter().sum::<f64>() - 6.0).abs() < 1e-12);

        let heat = read(&dir, "heatmap.csv");
        assert_eq!(heat.lines().next().unwrap(), "learner,Default,Diver");
        assert_eq!(heat.lines().count(), 2);
        assert!(read(&dir, "delta_e.csv").lines().count() == 1 + 2 * 2 * 2);
    }

    #[test]
    fn confusion_needs_shadow_runs() {
        let dir = store();
        let err = report(dir.path(), ReportKind::Confusion, &ReportOptions::default()).unwrap_err();
        assert!(err.to_string().contains("shadow"));
        let cfg = ExperimentConfig::parse(CONFIG).unwrap();
        let opts = RunOptions {
            output_dir: Some(dir.path().into()),
            ..RunOptions::new(Verb::Shadow)
        };
        run_experiment(&cfg, &opts).unwrap();
        report(dir.path(), ReportKind::Confusion, &ReportOptions::default()).unwrap();
        assert!(read(&dir, "confusion.csv").lines().count() > 1);
    }

    #[test]
    fn stats_need_enough_functions() {
        let dir = store();
        report(dir.path(), ReportKind::Stats, &ReportOptions::default()).unwrap();
        let stats = read(&dir, "stats.csv");
        assert!(stats.starts_with("config,mean_rank,control,statistic,n,exact,p_value,p_holm,significant\n"));
        assert_eq!(stats.lines().filter(|l| l.ends_with(",NA,NA,NA,NA,NA,")).count(), 3);
    }

    #[test]
    fn stats_mark_significance() {
        let functions: Vec<String> = (1..=8).map(|i| format!("F{i}")).collect();
        let medians: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 + 5.0, i as f64, i as f64 + 0.5]).collect();
        let r = Ranking {
            configs: vec!["A".into(), "B".into(), "C".into()],
            mean_ranks: vec![3.0, 1.0, 2.0],
            functions,
            medians,
        };
        let tables = stats_tables(&r).unwrap();
        let stats = String::from_utf8(tables[1].1.bytes().unwrap()).unwrap();
        let lines: Vec<&str> = stats.lines().collect();
        assert!(lines[1].starts_with("B,1,B,NA"));
        assert!(
            lines[2].starts_with("C,2,B,0,8,true,0.0078125,0.015625,*"),
            "{}",
            lines[2]
        );
        assert!(
            lines[3].starts_with("A,3,B,0,8,true,0.0078125,0.015625,*"),
            "{}",
            lines[3]
        );
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("delta-e".parse::<ReportKind>().unwrap(), ReportKind::DeltaE);
        assert!("plots".parse::<ReportKind>().is_err());
    }
}
