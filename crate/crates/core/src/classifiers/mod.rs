//! Deterministic reference classifiers for the encoding benchmark.
//!
//! Seven binary classifiers share one `train`/`scores`/`predict` interface.
//! Every score is oriented so that higher means more attack-like; `predict`
//! compares the score against a per-kind decision threshold (0 for margin and
//! log-odds scores, 0.5 for tree-probability scores). Training is
//! single-threaded and fully determined by `(config, data)`.

mod ensemble;
pub mod linear;
mod naive_bayes;
mod tree;

use ndarray::ArrayView2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::ClassLabel;
use crate::error::{Error, Result};
use ensemble::{train_adaboost, train_forest, BoostModel, ForestModel};
use naive_bayes::{train_gnb, GnbModel};
use tree::{GrowParams, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    LogisticRegression,
    LinearSvm,
    DecisionTree,
    AdaboostStumps,
    AdaboostDepth5,
    RandomForest,
    GaussianNb,
}

pub const ALL_CLASSIFIERS: [ClassifierKind; 7] = [
    ClassifierKind::LogisticRegression,
    ClassifierKind::LinearSvm,
    ClassifierKind::DecisionTree,
    ClassifierKind::AdaboostStumps,
    ClassifierKind::AdaboostDepth5,
    ClassifierKind::RandomForest,
    ClassifierKind::GaussianNb,
];

impl ClassifierKind {
    pub fn label(&self) -> &'static str {
        match self {
            ClassifierKind::LogisticRegression => "logistic_regression",
            ClassifierKind::LinearSvm => "linear_svm",
            ClassifierKind::DecisionTree => "decision_tree",
            ClassifierKind::AdaboostStumps => "adaboost_stumps",
            ClassifierKind::AdaboostDepth5 => "adaboost_depth5",
            ClassifierKind::RandomForest => "random_forest",
            ClassifierKind::GaussianNb => "gaussian_nb",
        }
    }

    pub fn parse(label: &str) -> Result<ClassifierKind> {
        ALL_CLASSIFIERS
            .iter()
            .find(|k| k.label() == label)
            .copied()
            .ok_or_else(|| Error::UnknownClassifier(label.to_string()))
    }
}

/// Training hyperparameters. `None` fields fall back to per-kind defaults:
/// trees depth 5; decision tree caps candidate features at min(8, d), the
/// forest at min(5, d); 50 stump rounds or 10 depth-5 rounds for AdaBoost;
/// 10 forest trees; 1000 epochs at tolerance 1e-6 and C = 1 for the linear
/// models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub seed: u64,
    pub c: f64,
    pub epochs: usize,
    pub tolerance: f64,
    pub max_depth: Option<usize>,
    pub max_features: Option<usize>,
    pub n_trees: Option<usize>,
    pub rounds: Option<usize>,
    pub bootstrap: bool,
}

impl ClassifierConfig {
    pub fn new(kind: ClassifierKind) -> Self {
        ClassifierConfig {
            kind,
            seed: 0,
            c: 1.0,
            epochs: 1000,
            tolerance: 1e-6,
            max_depth: None,
            max_features: None,
            n_trees: None,
            rounds: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ModelParams {
    Linear { weights: Vec<f64>, bias: f64 },
    Tree(Tree),
    Boost(BoostModel),
    Forest(ForestModel),
    Gnb(GnbModel),
}

/// An immutable trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    kind: ClassifierKind,
    n_features: usize,
    inner: ModelParams,
}

fn validate_inputs(x: ArrayView2<f64>, y: &[ClassLabel]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch(x.nrows(), y.len()));
    }
    if y.len() < 2 {
        return Err(Error::TooFewRows(y.len()));
    }
    let attacks = y.iter().filter(|l| **l == ClassLabel::Attack).count();
    if attacks == 0 || attacks == y.len() {
        return Err(Error::SingleClass);
    }
    for ((r, c), v) in x.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFiniteFeature(r, c));
        }
    }
    Ok(())
}

fn to_zero_one(y: &[ClassLabel]) -> Vec<f64> {
    y.iter()
        .map(|l| f64::from(*l == ClassLabel::Attack))
        .collect()
}

/// Train a classifier of `config.kind` on `x` (rows) and `y`.
pub fn train(config: &ClassifierConfig, x: ArrayView2<f64>, y: &[ClassLabel]) -> Result<TrainedModel> {
    validate_inputs(x, y)?;
    let y01 = to_zero_one(y);
    let n = y.len() as f64;
    let lambda = 1.0 / (config.c * n);
    let inner = match config.kind {
        ClassifierKind::LogisticRegression => {
            let z: Vec<f64> = y01.iter().map(|v| 2.0 * v - 1.0).collect();
            let (weights, bias) =
                linear::train_logistic(x, &z, lambda, config.epochs, config.tolerance);
            ModelParams::Linear { weights, bias }
        }
        ClassifierKind::LinearSvm => {
            let z: Vec<f64> = y01.iter().map(|v| 2.0 * v - 1.0).collect();
            let (weights, bias) = linear::train_linear_svm(x, &z, lambda, config.epochs);
            ModelParams::Linear { weights, bias }
        }
        ClassifierKind::DecisionTree => {
            let params = GrowParams {
                max_depth: config.max_depth.unwrap_or(5),
                max_features: config.max_features.unwrap_or_else(|| x.ncols().min(8)),
            };
            let rows: Vec<usize> = (0..y.len()).collect();
            let w = vec![1.0; y.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            ModelParams::Tree(Tree::grow(x, &y01, &w, &rows, &params, &mut rng))
        }
        ClassifierKind::AdaboostStumps => ModelParams::Boost(train_adaboost(
            x,
            &y01,
            config.rounds.unwrap_or(50),
            config.max_depth.unwrap_or(1),
            config.seed,
        )),
        ClassifierKind::AdaboostDepth5 => ModelParams::Boost(train_adaboost(
            x,
            &y01,
            config.rounds.unwrap_or(10),
            config.max_depth.unwrap_or(5),
            config.seed,
        )),
        ClassifierKind::RandomForest => ModelParams::Forest(train_forest(
            x,
            &y01,
            config.n_trees.unwrap_or(10),
            config.max_depth.unwrap_or(5),
            config.max_features.unwrap_or_else(|| x.ncols().min(5)),
            config.bootstrap,
            config.seed,
        )),
        ClassifierKind::GaussianNb => ModelParams::Gnb(train_gnb(x, &y01)),
    };
    Ok(TrainedModel {
        kind: config.kind,
        n_features: x.ncols(),
        inner,
    })
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Score above which a row is predicted as attack.
    pub fn decision_threshold(&self) -> f64 {
        match self.inner {
            ModelParams::Tree(_) | ModelParams::Forest(_) => 0.5,
            _ => 0.0,
        }
    }

    /// Continuous scores, higher = more attack-like.
    pub fn scores(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::WidthMismatch {
                expected: self.n_features,
                found: x.ncols(),
            });
        }
        let scores = match &self.inner {
            ModelParams::Linear { weights, bias } => x
                .rows()
                .into_iter()
                .map(|row| row.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>() + bias)
                .collect(),
            ModelParams::Tree(tree) => (0..x.nrows()).map(|r| tree.predict_row(x, r)).collect(),
            ModelParams::Boost(boost) => (0..x.nrows()).map(|r| boost.score_row(x, r)).collect(),
            ModelParams::Forest(forest) => {
                (0..x.nrows()).map(|r| forest.score_row(x, r)).collect()
            }
            ModelParams::Gnb(gnb) => (0..x.nrows()).map(|r| gnb.score_row(x, r)).collect(),
        };
        Ok(scores)
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<ClassLabel>> {
        let threshold = self.decision_threshold();
        Ok(self
            .scores(x)?
            .into_iter()
            .map(|s| {
                if s >= threshold {
                    ClassLabel::Attack
                } else {
                    ClassLabel::Normal
                }
            })
            .collect())
    }

    /// For boosting models: 0/1 training error after each round. Errors for
    /// other kinds.
    pub fn staged_training_error(
        &self,
        x: ArrayView2<f64>,
        y: &[ClassLabel],
    ) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::WidthMismatch {
                expected: self.n_features,
                found: x.ncols(),
            });
        }
        if x.nrows() != y.len() {
            return Err(Error::LengthMismatch(x.nrows(), y.len()));
        }
        match &self.inner {
            ModelParams::Boost(boost) => Ok(boost.staged_errors(x, &to_zero_one(y))),
            _ => Err(Error::InvalidParam(format!(
                "{} is not a boosting model",
                self.kind.label()
            ))),
        }
    }
}
