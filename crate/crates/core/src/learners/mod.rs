//! Supervised learners in regressor and classifier form, Gaussian-process
//! regression, and Latin hypercube sampling.

mod boosting;
mod dataset;
mod forest;
mod gpr;
mod lhs;
mod linalg;
mod mlp;
mod ridge;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use boosting::GradientBoosting;
pub use dataset::Dataset;
pub use forest::RandomForest;
pub use gpr::{GaussianProcess, MAX_JITTER};
pub use lhs::latin_hypercube_sample;
pub use mlp::Mlp;
pub use ridge::Ridge;
pub use tree::DecisionTree;

use crate::domain::Rng;
use crate::error::{Error, Result};
use mlp::MlpParams;
pub use tree::MAX_BINS;
use tree::{Binned, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Ridge,
    DecisionTree,
    RandomForest,
    GradientBoosting,
    Mlp,
    Gpr,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 6] = [
        LearnerKind::Ridge,
        LearnerKind::DecisionTree,
        LearnerKind::RandomForest,
        LearnerKind::GradientBoosting,
        LearnerKind::Mlp,
        LearnerKind::Gpr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Ridge => "ridge",
            LearnerKind::DecisionTree => "decision_tree",
            LearnerKind::RandomForest => "random_forest",
            LearnerKind::GradientBoosting => "gradient_boosting",
            LearnerKind::Mlp => "mlp",
            LearnerKind::Gpr => "gpr",
        }
    }

    /// Short label used in reports (`DT`, `RF`, ...).
    pub fn short(self) -> &'static str {
        match self {
            LearnerKind::Ridge => "Ridge",
            LearnerKind::DecisionTree => "DT",
            LearnerKind::RandomForest => "RF",
            LearnerKind::GradientBoosting => "GB",
            LearnerKind::Mlp => "MLP",
            LearnerKind::Gpr => "GPR",
        }
    }

    /// Deterministic learners produce the same model from the same data
    /// regardless of the random stream, up to tie-breaking between equally
    /// good splits.
    pub fn is_stochastic(self) -> bool {
        matches!(self, LearnerKind::RandomForest | LearnerKind::Mlp)
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown learner `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Regressor,
    Classifier,
}

/// Learner settings. Defaults follow the documented configuration: ridge
/// penalty 1 with a free intercept; unlimited trees; 40-tree forests;
/// 50 rounds of depth-3 boosting with shrinkage 0.3; a 100-unit MLP trained
/// for 20 epochs at step 0.01; a unit squared-exponential GP with jitter 1e-10.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub ridge_alpha: f64,
    pub fit_intercept: bool,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub n_estimators: usize,
    pub bootstrap: bool,
    /// Features inspected per split in forests; `None` picks sqrt(F) for
    /// classification and F/3 for regression.
    pub max_features: Option<usize>,
    /// Bins per feature for tree split search (2..=256).
    pub max_bins: usize,
    pub boosting_rounds: usize,
    pub boosting_depth: usize,
    pub boosting_learning_rate: f64,
    pub hidden_units: usize,
    pub mlp_learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2: f64,
    pub length_scale: f64,
    pub signal_variance: f64,
    pub jitter: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            ridge_alpha: 1.0,
            fit_intercept: true,
            max_depth: None,
            min_samples_split: 2,
            n_estimators: 40,
            bootstrap: true,
            max_features: None,
            max_bins: MAX_BINS,
            boosting_rounds: 50,
            boosting_depth: 3,
            boosting_learning_rate: 0.3,
            hidden_units: 100,
            mlp_learning_rate: 0.01,
            epochs: 20,
            batch_size: 200,
            l2: 1e-4,
            length_scale: 1.0,
            signal_variance: 1.0,
            jitter: 1e-10,
        }
    }
}

impl Hyperparameters {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("hyperparameter out of range: {what}")));
        if !(self.ridge_alpha >= 0.0) {
            return bad("ridge_alpha must be >= 0");
        }
        if self.min_samples_split < 2 {
            return bad("min_samples_split must be >= 2");
        }
        if self.n_estimators == 0 || self.boosting_rounds == 0 {
            return bad("ensembles need at least one member");
        }
        if !(2..=MAX_BINS).contains(&self.max_bins) {
            return bad("max_bins must lie in 2..=256");
        }
        if self.max_features == Some(0) {
            return bad("max_features must be >= 1");
        }
        if !(self.boosting_learning_rate > 0.0) || !(self.mlp_learning_rate > 0.0) {
            return bad("learning rates must be > 0");
        }
        if self.hidden_units == 0 || self.batch_size == 0 {
            return bad("hidden_units and batch_size must be >= 1");
        }
        if !(self.length_scale > 0.0) || !(self.signal_variance > 0.0) || !(self.jitter > 0.0) {
            return bad("GP length scale, signal variance and jitter must be > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub mode: Mode,
    pub params: Hyperparameters,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind, mode: Mode) -> Result<Self> {
        LearnerSpec::with_params(kind, mode, Hyperparameters::default())
    }

    pub fn with_params(kind: LearnerKind, mode: Mode, params: Hyperparameters) -> Result<Self> {
        if kind == LearnerKind::Gpr && mode == Mode::Classifier {
            return Err(Error::Config("gpr is only available as a regressor".into()));
        }
        params.validate()?;
        Ok(LearnerSpec { kind, mode, params })
    }

    /// `DT/C`, `Ridge/R`, ...
    pub fn label(&self) -> String {
        let m = match self.mode {
            Mode::Regressor => "R",
            Mode::Classifier => "C",
        };
        format!("{}/{}", self.kind.short(), m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum ModelParams {
    Ridge(Ridge),
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    GradientBoosting(GradientBoosting),
    Mlp(Mlp),
    Gpr(GaussianProcess),
}

/// A fitted learner. Immutable; safe to share between threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub mode: Mode,
    pub feature_count: usize,
    pub training_row_count: usize,
    pub params: ModelParams,
}

/// Version tag written by [`TrainedModel::dump`].
pub const DUMP_FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct Dump<'a> {
    format_version: u32,
    model: &'a TrainedModel,
}

/// Fits a learner. Classifier targets must be 0 or 1.
pub fn fit(spec: &LearnerSpec, data: &Dataset, rng: &mut Rng) -> Result<TrainedModel> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let classifier = spec.mode == Mode::Classifier;
    if classifier && data.targets().iter().any(|t| *t != 0.0 && *t != 1.0) {
        return Err(Error::InvalidInput("classifier targets must be 0 or 1".into()));
    }
    let p = &spec.params;
    let n_features = data.n_features();
    let tree_params = |max_depth, max_features| TreeParams {
        max_depth,
        min_samples_split: p.min_samples_split,
        max_features,
    };
    let params = match spec.kind {
        LearnerKind::Ridge => {
            let signed: Vec<f64>;
            let targets = if classifier {
                signed = data.targets().iter().map(|t| 2.0 * t - 1.0).collect();
                &signed
            } else {
                data.targets()
            };
            ModelParams::Ridge(Ridge::fit(data, targets, p.ridge_alpha, p.fit_intercept))
        }
        LearnerKind::DecisionTree => {
            let binned = Binned::new(&data.column_index(), p.max_bins);
            let tp = tree_params(p.max_depth, n_features);
            ModelParams::DecisionTree(tree::grow(&binned, data.targets(), None, &tp, rng))
        }
        LearnerKind::RandomForest => {
            let binned = Binned::new(&data.column_index(), p.max_bins);
            let default_features = if classifier {
                (n_features as f64).sqrt() as usize
            } else {
                n_features / 3
            };
            let tp = tree_params(p.max_depth, p.max_features.unwrap_or(default_features).max(1));
            ModelParams::RandomForest(RandomForest::fit(
                &binned,
                data.targets(),
                p.n_estimators,
                p.bootstrap,
                &tp,
                rng,
            ))
        }
        LearnerKind::GradientBoosting => {
            let binned = Binned::new(&data.column_index(), p.max_bins);
            let tp = tree_params(Some(p.boosting_depth), n_features);
            ModelParams::GradientBoosting(GradientBoosting::fit(
                data,
                &binned,
                p.boosting_rounds,
                p.boosting_learning_rate,
                &tp,
                classifier,
                rng,
            ))
        }
        LearnerKind::Mlp => {
            let mp = MlpParams {
                hidden: p.hidden_units,
                learning_rate: p.mlp_learning_rate,
                epochs: p.epochs,
                batch_size: p.batch_size,
                l2: p.l2,
            };
            ModelParams::Mlp(Mlp::fit(data, classifier, &mp, rng).0)
        }
        LearnerKind::Gpr => ModelParams::Gpr(GaussianProcess::fit(data, p.length_scale, p.signal_variance, p.jitter)?),
    };
    Ok(TrainedModel {
        mode: spec.mode,
        feature_count: n_features,
        training_row_count: data.len(),
        params,
    })
}

/// Trains an MLP and reports the loss before training and after each epoch.
pub fn mlp_loss_history(spec: &LearnerSpec, data: &Dataset, rng: &mut Rng) -> Result<Vec<f64>> {
    if spec.kind != LearnerKind::Mlp {
        return Err(Error::InvalidInput("loss history is only tracked for mlp".into()));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let p = &spec.params;
    let mp = MlpParams {
        hidden: p.hidden_units,
        learning_rate: p.mlp_learning_rate,
        epochs: p.epochs,
        batch_size: p.batch_size,
        l2: p.l2,
    };
    Ok(Mlp::fit(data, spec.mode == Mode::Classifier, &mp, rng).1)
}

impl TrainedModel {
    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_count {
            return Err(Error::DimensionMismatch {
                expected: self.feature_count,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Raw model output: the regression value, the probability of class 1,
    /// or the signed decision value for ridge classifiers.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(match &self.params {
            ModelParams::Ridge(m) => m.predict(x),
            ModelParams::DecisionTree(m) => m.predict(x),
            ModelParams::RandomForest(m) => m.predict(x),
            ModelParams::GradientBoosting(m) => m.predict(x),
            ModelParams::Mlp(m) => m.predict(x),
            ModelParams::Gpr(m) => m.predict(x),
        })
    }

    fn threshold(&self) -> f64 {
        match self.params {
            ModelParams::Ridge(_) => 0.0,
            _ => 0.5,
        }
    }

    pub fn predict_value(&self, x: &[f64]) -> Result<f64> {
        if self.mode != Mode::Regressor {
            return Err(Error::WrongMode { expected: "regressor" });
        }
        self.score(x)
    }

    pub fn predict_class(&self, x: &[f64]) -> Result<u8> {
        if self.mode != Mode::Classifier {
            return Err(Error::WrongMode { expected: "classifier" });
        }
        Ok(u8::from(self.score(x)? > self.threshold()))
    }

    /// Distance of the classifier score from its decision threshold.
    pub fn class_margin(&self, x: &[f64]) -> Result<f64> {
        if self.mode != Mode::Classifier {
            return Err(Error::WrongMode { expected: "classifier" });
        }
        Ok((self.score(x)? - self.threshold()).abs())
    }

    /// Versioned JSON dump of the fitted parameters, for debugging.
    pub fn dump(&self) -> String {
        serde_json::to_string_pretty(&Dump {
            format_version: DUMP_FORMAT_VERSION,
            model: self,
        })
        .expect("models serialise to JSON")
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng as _, SeedableRng};

    use super::*;

    fn rng(seed: u64) -> Rng {
        Rng::seed_from_u64(seed)
    }

    fn spec(kind: LearnerKind, mode: Mode) -> LearnerSpec {
        LearnerSpec::new(kind, mode).unwrap()
    }

    #[test]
    fn ridge_without_intercept_matches_closed_form() {
        let mut s = spec(LearnerKind::Ridge, Mode::Regressor);
        s.params.fit_intercept = false;
        let ds = Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], &[1.0, 2.0, 3.0]).unwrap();
        let m = fit(&s, &ds, &mut rng(0)).unwrap();
        let ModelParams::Ridge(r) = &m.params else { panic!() };
        // w = sum(xy) / (sum(x^2) + lambda) = 14 / 15
        assert!((r.weights()[0] - 14.0 / 15.0).abs() < 1e-12);
        assert!((m.predict_value(&[2.0]).unwrap() - 28.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn ridge_intercept_is_unpenalised() {
        let s = spec(LearnerKind::Ridge, Mode::Regressor);
        let ds = Dataset::from_rows(&[vec![0.0], vec![0.0]], &[5.0, 5.0]).unwrap();
        let m = fit(&s, &ds, &mut rng(0)).unwrap();
        assert!((m.predict_value(&[0.0]).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn ridge_singular_system_is_not_an_error() {
        let mut s = spec(LearnerKind::Ridge, Mode::Regressor);
        s.params.ridge_alpha = 0.0;
        let rows = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let m = fit(&s, &Dataset::from_rows(&rows, &[1.0, 2.0, 3.0]).unwrap(), &mut rng(0)).unwrap();
        assert!(m.predict_value(&[4.0, 4.0]).unwrap().is_finite());
    }

    #[test]
    fn ridge_classifier_uses_sign() {
        let s = spec(LearnerKind::Ridge, Mode::Classifier);
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| f64::from(u8::from(i >= 5))).collect();
        let m = fit(&s, &Dataset::from_rows(&rows, &y).unwrap(), &mut rng(0)).unwrap();
        assert_eq!(m.predict_class(&[0.0]).unwrap(), 0);
        assert_eq!(m.predict_class(&[9.0]).unwrap(), 1);
        let all_one = fit(&s, &Dataset::from_rows(&rows, &[1.0; 10]).unwrap(), &mut rng(0)).unwrap();
        assert_eq!(all_one.predict_class(&[3.0]).unwrap(), 1);
    }

    #[test]
    fn tree_examples() {
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0]], &[0.0, 1.0]).unwrap();
        let c = fit(&spec(LearnerKind::DecisionTree, Mode::Classifier), &ds, &mut rng(1)).unwrap();
        assert_eq!(c.predict_class(&[0.0]).unwrap(), 0);
        assert_eq!(c.predict_class(&[1.0]).unwrap(), 1);

        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![7.0]], &[4.0, 4.0, 4.0]).unwrap();
        let r = fit(&spec(LearnerKind::DecisionTree, Mode::Regressor), &ds, &mut rng(1)).unwrap();
        assert_eq!(r.predict_value(&[-30.0]).unwrap(), 4.0);

        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0]], &[1.0, 1.0]).unwrap();
        for kind in [
            LearnerKind::DecisionTree,
            LearnerKind::RandomForest,
            LearnerKind::GradientBoosting,
            LearnerKind::Ridge,
            LearnerKind::Mlp,
        ] {
            let m = fit(&spec(kind, Mode::Classifier), &ds, &mut rng(2)).unwrap();
            assert_eq!(m.predict_class(&[0.5]).unwrap(), 1, "{kind}");
        }
    }

    #[test]
    fn gpr_interpolates() {
        let s = spec(LearnerKind::Gpr, Mode::Regressor);
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0]], &[0.0, 1.0]).unwrap();
        let m = fit(&s, &ds, &mut rng(0)).unwrap();
        assert!(m.predict_value(&[0.0]).unwrap().abs() < 1e-6);
        assert!((m.predict_value(&[1.0]).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gpr_tolerates_duplicates() {
        let s = spec(LearnerKind::Gpr, Mode::Regressor);
        let ds = Dataset::from_rows(&[vec![0.5], vec![0.5], vec![2.0]], &[1.0, 1.0, 3.0]).unwrap();
        let m = fit(&s, &ds, &mut rng(0)).unwrap();
        let ModelParams::Gpr(g) = &m.params else { panic!() };
        assert!(g.jitter() >= 1e-10 && g.jitter() <= MAX_JITTER);
        assert!((m.predict_value(&[0.5]).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn gpr_classifier_is_rejected() {
        assert!(LearnerSpec::new(LearnerKind::Gpr, Mode::Classifier).is_err());
    }

    #[test]
    fn errors() {
        let s = spec(LearnerKind::DecisionTree, Mode::Classifier);
        assert!(matches!(
            fit(&s, &Dataset::new(2), &mut rng(0)),
            Err(Error::EmptyDataset)
        ));
        let ds = Dataset::from_rows(&[vec![0.0]], &[0.5]).unwrap();
        assert!(fit(&s, &ds, &mut rng(0)).is_err());
        let ds = Dataset::from_rows(&[vec![0.0, 1.0]], &[1.0]).unwrap();
        let m = fit(&s, &ds, &mut rng(0)).unwrap();
        assert!(matches!(m.predict_class(&[0.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(m.predict_value(&[0.0, 1.0]), Err(Error::WrongMode { .. })));
    }

    #[test]
    fn forest_with_one_unbagged_tree_equals_tree() {
        let mut r = rng(9);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..4).map(|_| r.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = rows.iter().map(|x| x[0] * x[1] + x[2].sin() + 0.1 * x[3]).collect();
        let ds = Dataset::from_rows(&rows, &y).unwrap();
        let tree = fit(&spec(LearnerKind::DecisionTree, Mode::Regressor), &ds, &mut rng(1)).unwrap();
        let mut fs = spec(LearnerKind::RandomForest, Mode::Regressor);
        fs.params.n_estimators = 1;
        fs.params.bootstrap = false;
        fs.params.max_features = Some(4);
        let forest = fit(&fs, &ds, &mut rng(2)).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| r.gen_range(-1.2..1.2)).collect();
            assert_eq!(tree.predict_value(&x).unwrap(), forest.predict_value(&x).unwrap());
        }
    }

    #[test]
    fn one_round_of_boosting_equals_its_tree() {
        let mut r = rng(4);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..3).map(|_| r.gen_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<f64> = rows.iter().map(|x| x[0] * x[0] - x[1] + 3.0).collect();
        let ds = Dataset::from_rows(&rows, &y).unwrap();
        let mut bs = spec(LearnerKind::GradientBoosting, Mode::Regressor);
        bs.params.boosting_rounds = 1;
        bs.params.boosting_learning_rate = 1.0;
        let boosted = fit(&bs, &ds, &mut rng(5)).unwrap();
        let mut ts = spec(LearnerKind::DecisionTree, Mode::Regressor);
        ts.params.max_depth = Some(3);
        let tree = fit(&ts, &ds, &mut rng(5)).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| r.gen_range(-2.5..2.5)).collect();
            let (a, b) = (boosted.predict_value(&x).unwrap(), tree.predict_value(&x).unwrap());
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn boosting_classifier_separates() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let y: Vec<f64> = (0..40).map(|i| f64::from(u8::from(i >= 20))).collect();
        let m = fit(
            &spec(LearnerKind::GradientBoosting, Mode::Classifier),
            &Dataset::from_rows(&rows, &y).unwrap(),
            &mut rng(0),
        )
        .unwrap();
        for (row, t) in rows.iter().zip(&y) {
            assert_eq!(f64::from(m.predict_class(row).unwrap()), *t);
        }
    }

    #[test]
    fn mlp_learns_a_line() {
        let rows: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64 / 100.0 - 1.0]).collect();
        let y: Vec<f64> = rows.iter().map(|x| 2.0 * x[0] + 0.5).collect();
        let ds = Dataset::from_rows(&rows, &y).unwrap();
        let mut s = spec(LearnerKind::Mlp, Mode::Regressor);
        s.params.epochs = 200;
        let hist = mlp_loss_history(&s, &ds, &mut rng(3)).unwrap();
        assert!(hist.last().unwrap() < &0.01, "final loss {}", hist.last().unwrap());
    }

    #[test]
    fn fitting_is_deterministic_given_stream() {
        let mut r = rng(8);
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..5).map(|_| r.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = rows.iter().map(|x| f64::from(u8::from(x[0] + x[1] > 0.0))).collect();
        let ds = Dataset::from_rows(&rows, &y).unwrap();
        for kind in [
            LearnerKind::RandomForest,
            LearnerKind::Mlp,
            LearnerKind::DecisionTree,
            LearnerKind::GradientBoosting,
        ] {
            let s = spec(kind, Mode::Classifier);
            let a = fit(&s, &ds, &mut rng(77)).unwrap();
            let b = fit(&s, &ds, &mut rng(77)).unwrap();
            assert_eq!(a, b, "{kind}");
        }
    }

    #[test]
    fn dump_is_versioned_json() {
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0]], &[0.0, 1.0]).unwrap();
        let m = fit(&spec(LearnerKind::DecisionTree, Mode::Classifier), &ds, &mut rng(0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.dump()).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["model"]["params"]["learner"], "decision_tree");
    }
}
