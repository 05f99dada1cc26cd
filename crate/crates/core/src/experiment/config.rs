use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{make_suite, BenchmarkSpec};
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::optimizer::DEConfig;
use crate::strategies::{StrategyFlags, P_BASE};
use crate::surrogate::{Approach, Mapping, SurrogateConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Inner-loop evaluations of the GP mean per unit of `allowance_scale`.
pub const KRIGING_ALLOWANCE_UNIT: f64 = 60_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub suite: SuiteSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub de: DeSection,
    #[serde(rename = "configuration", default)]
    pub configurations: Vec<ConfigurationSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    pub dim: usize,
    pub seed: u64,
    /// Function ids to run; all 19 when absent.
    pub functions: Option<Vec<String>>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        SuiteSection {
            dim: 50,
            seed: 1,
            functions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub repetitions: usize,
    pub base_seed: u64,
    pub budget_multiplier: usize,
    pub output_dir: PathBuf,
    /// Runs executed concurrently.
    pub workers: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            repetitions: 15,
            base_seed: 2021,
            budget_multiplier: 15,
            output_dir: PathBuf::from("results"),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeSection {
    pub pop_size: usize,
    pub f: f64,
    pub cr: f64,
    pub no_improvement_limit: usize,
    /// Threads evaluating one generation's accepted challengers.
    pub eval_workers: usize,
}

impl Default for DeSection {
    fn default() -> Self {
        let d = DEConfig::default();
        DeSection {
            pop_size: d.pop_size,
            f: d.f,
            cr: d.cr,
            no_improvement_limit: d.no_improvement_limit,
            eval_workers: d.workers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproachKind {
    None,
    Surface,
    Pairwise,
    KrigingOffline,
}

impl ApproachKind {
    pub fn name(self) -> &'static str {
        match self {
            ApproachKind::None => "none",
            ApproachKind::Surface => "surface",
            ApproachKind::Pairwise => "pairwise",
            ApproachKind::KrigingOffline => "kriging_offline",
        }
    }
}

impl FromStr for ApproachKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ApproachKind::None),
            "surface" => Ok(ApproachKind::Surface),
            "pairwise" => Ok(ApproachKind::Pairwise),
            "kriging_offline" => Ok(ApproachKind::KrigingOffline),
            _ => Err(Error::Config(format!("unknown approach `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationSection {
    pub label: String,
    pub approach: ApproachKind,
    #[serde(default)]
    pub learner: Option<String>,
    /// Any of `prob`, `qual`, `diver`.
    #[serde(default)]
    pub strategies: Vec<String>,
    #[serde(default)]
    pub p_base: Option<f64>,
    #[serde(default)]
    pub warmup: Option<usize>,
    #[serde(default)]
    pub trail: Option<usize>,
    #[serde(default)]
    pub mapping: Option<Mapping>,
    #[serde(default)]
    pub budget_multiplier: Option<usize>,
    #[serde(default)]
    pub allowance_scale: Option<f64>,
}

/// What one configuration runs.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    PlainDe,
    Surrogate {
        surrogate: SurrogateConfig,
        flags: StrategyFlags,
    },
    KrigingOffline {
        allowance: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfiguration {
    pub label: String,
    pub slug: String,
    pub approach: ApproachKind,
    pub method: Method,
    pub de: DEConfig,
}

impl ResolvedConfiguration {
    pub fn is_surrogate(&self) -> bool {
        matches!(self.method, Method::Surrogate { .. })
    }

    /// Learner label such as `DT/C`, empty for non-surrogate methods.
    pub fn learner_label(&self) -> String {
        match &self.method {
            Method::Surrogate { surrogate, .. } => surrogate.label(),
            _ => String::new(),
        }
    }

    pub fn strategy_label(&self) -> String {
        match &self.method {
            Method::Surrogate { flags, .. } => flags.label(),
            _ => String::new(),
        }
    }
}

/// Accepts `decision_tree` style names and the short report labels.
pub fn parse_learner(s: &str) -> Result<LearnerKind> {
    LearnerKind::from_str(s).or_else(|_| {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.short().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown learner `{s}`")))
    })
}

/// File-system friendly form of a label.
pub fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn parse_flags(strategies: &[String], p_base: Option<f64>) -> Result<StrategyFlags> {
    let mut flags = StrategyFlags {
        p_base: p_base.unwrap_or(P_BASE),
        ..StrategyFlags::default()
    };
    for s in strategies {
        let slot = match s.to_ascii_lowercase().as_str() {
            "prob" => &mut flags.use_prob,
            "qual" => &mut flags.use_qual,
            "diver" => &mut flags.use_diver,
            _ => return Err(Error::Config(format!("unknown strategy `{s}`"))),
        };
        if *slot {
            return Err(Error::Config(format!("strategy `{s}` listed twice")));
        }
        *slot = true;
    }
    flags.validate()?;
    Ok(flags)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.experiment.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if self.experiment.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if self.configurations.is_empty() {
            return Err(Error::Config("at least one [[configuration]] is required".into()));
        }
        let mut labels = HashSet::new();
        let mut slugs = HashSet::new();
        for c in &self.configurations {
            if c.label.trim().is_empty() {
                return Err(Error::Config("configuration labels must not be empty".into()));
            }
            if !labels.insert(c.label.as_str()) {
                return Err(Error::Config(format!("duplicate configuration label `{}`", c.label)));
            }
            if !slugs.insert(slug(&c.label)) {
                return Err(Error::Config(format!(
                    "configuration label `{}` collides with another after file-name mangling",
                    c.label
                )));
            }
        }
        self.suite()?;
        self.resolve()?;
        Ok(())
    }

    /// Suite functions selected by the config, in suite order.
    pub fn suite(&self) -> Result<Vec<BenchmarkSpec>> {
        let all = make_suite(self.suite.dim, self.suite.seed)?;
        let Some(ids) = &self.suite.functions else {
            return Ok(all);
        };
        if ids.is_empty() {
            return Err(Error::Config("suite.functions must not be empty".into()));
        }
        let mut seen = HashSet::new();
        for id in ids {
            if !all.iter().any(|f| &f.id == id) {
                return Err(Error::UnknownFunction(id.clone()));
            }
            if !seen.insert(id) {
                return Err(Error::Config(format!("function `{id}` listed twice")));
            }
        }
        Ok(all.into_iter().filter(|f| ids.contains(&f.id)).collect())
    }

    pub fn resolve(&self) -> Result<Vec<ResolvedConfiguration>> {
        self.configurations.iter().map(|c| self.resolve_one(c)).collect()
    }

    fn resolve_one(&self, c: &ConfigurationSection) -> Result<ResolvedConfiguration> {
        let context = |e: Error| Error::Config(format!("configuration `{}`: {e}", c.label));
        let multiplier = c.budget_multiplier.unwrap_or(self.experiment.budget_multiplier);
        let de = DEConfig {
            pop_size: self.de.pop_size,
            f: self.de.f,
            cr: self.de.cr,
            budget: multiplier * self.suite.dim,
            no_improvement_limit: self.de.no_improvement_limit,
            workers: self.de.eval_workers.max(1),
        };
        de.validate().map_err(context)?;
        if de.budget < de.pop_size {
            return Err(context(Error::Config(format!(
                "budget {} is smaller than the population",
                de.budget
            ))));
        }
        let surrogate_only = c.warmup.is_some()
            || c.trail.is_some()
            || c.mapping.is_some()
            || !c.strategies.is_empty()
            || c.p_base.is_some();
        let method = match c.approach {
            ApproachKind::None | ApproachKind::KrigingOffline => {
                if c.learner.is_some() || surrogate_only {
                    return Err(context(Error::Config(format!(
                        "learner, strategies, warmup, trail and mapping need a surface or pairwise approach, not `{}`",
                        c.approach.name()
                    ))));
                }
                if c.approach == ApproachKind::None {
                    if c.allowance_scale.is_some() {
                        return Err(context(Error::Config(
                            "allowance_scale only applies to kriging_offline".into(),
                        )));
                    }
                    Method::PlainDe
                } else {
                    let scale = c.allowance_scale.unwrap_or(1.0);
                    if !(scale > 0.0 && scale.is_finite()) {
                        return Err(context(Error::Config("allowance_scale must be > 0".into())));
                    }
                    if de.budget < 2 {
                        return Err(context(Error::Config("kriging_offline needs a budget >= 2".into())));
                    }
                    Method::KrigingOffline {
                        allowance: ((KRIGING_ALLOWANCE_UNIT * scale).round() as usize).max(de.pop_size),
                    }
                }
            }
            ApproachKind::Surface | ApproachKind::Pairwise => {
                if c.allowance_scale.is_some() {
                    return Err(context(Error::Config(
                        "allowance_scale only applies to kriging_offline".into(),
                    )));
                }
                let approach = if c.approach == ApproachKind::Surface {
                    Approach::Surface
                } else {
                    Approach::Pairwise
                };
                let name = c
                    .learner
                    .as_deref()
                    .ok_or_else(|| context(Error::Config("learner is required".into())))?;
                let kind = parse_learner(name).map_err(context)?;
                let mut surrogate = SurrogateConfig::new(approach, kind).map_err(context)?;
                if let Some(w) = c.warmup {
                    surrogate.warmup_generations = w;
                }
                if let Some(t) = c.trail {
                    surrogate.trail_size = t;
                }
                if let Some(m) = c.mapping {
                    surrogate.mapping = m;
                }
                surrogate.validate().map_err(context)?;
                let flags = parse_flags(&c.strategies, c.p_base).map_err(context)?;
                Method::Surrogate { surrogate, flags }
            }
        };
        Ok(ResolvedConfiguration {
            label: c.label.clone(),
            slug: slug(&c.label),
            approach: c.approach,
            method,
            de,
        })
    }
}
