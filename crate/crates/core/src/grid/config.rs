//! Benchmark configuration: a flat TOML file describing dataset paths, the
//! threshold and component grids, the baseline encoder list, and optional
//! per-classifier override blocks.
//!
//! Recognized keys:
//!
//! ```toml
//! train = "data/KDDTrain+.txt"   # required: training split path
//! test  = "data/KDDTest+.txt"    # required: test split path
//! seed = 0                       # classifier / subsample seed (default 0)
//! subsample = 0.1                # optional stratified fraction (0, 1]
//! thresholds = [1.87, 5.0]       # percent values; default: built-in sweep
//! pc_counts = [1, 2, 3]          # retained components; default 1..=6
//! encoders = ["one_hot"]         # baseline labels; default: all 16
//! sort_metric = "harmonic_accuracy"
//!
//! [classifiers.linear_svm]       # blocks select classifiers (default: all 7)
//! epochs = 1000                  # keys override training defaults
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineScheme, ALL_SCHEMES};
use crate::classifiers::{ClassifierConfig, ClassifierKind, ALL_CLASSIFIERS};
use crate::error::{Error, Result};
use crate::metrics::EvalRecord;

/// Threshold sweep (percent) used when the config does not name one: a
/// geometric-ish ladder over the supported range.
pub const DEFAULT_THRESHOLDS: [f64; 20] = [
    0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 1.87, 2.0, 3.0, 3.64, 5.0, 5.45, 10.0, 11.9, 15.0,
    20.0, 30.0, 40.0, 50.0,
];

/// Leaderboard ordering criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortMetric {
    TestAccuracy,
    HarmonicAccuracy,
    MseAccuracy,
    TestAuc,
    HarmonicAuc,
    MseAuc,
}

pub const ALL_SORT_METRICS: [SortMetric; 6] = [
    SortMetric::TestAccuracy,
    SortMetric::HarmonicAccuracy,
    SortMetric::MseAccuracy,
    SortMetric::TestAuc,
    SortMetric::HarmonicAuc,
    SortMetric::MseAuc,
];

impl SortMetric {
    pub fn label(&self) -> &'static str {
        match self {
            SortMetric::TestAccuracy => "test_accuracy",
            SortMetric::HarmonicAccuracy => "harmonic_accuracy",
            SortMetric::MseAccuracy => "mse_accuracy",
            SortMetric::TestAuc => "test_auc",
            SortMetric::HarmonicAuc => "harmonic_auc",
            SortMetric::MseAuc => "mse_auc",
        }
    }

    pub fn parse(label: &str) -> Result<SortMetric> {
        ALL_SORT_METRICS
            .iter()
            .find(|m| m.label() == label)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown sort_metric '{label}'")))
    }

    /// MSE metrics rank ascending (smaller is better), everything else
    /// descending.
    pub fn ascending(&self) -> bool {
        matches!(self, SortMetric::MseAccuracy | SortMetric::MseAuc)
    }

    pub fn value(&self, r: &EvalRecord) -> f64 {
        match self {
            SortMetric::TestAccuracy => r.test_accuracy,
            SortMetric::HarmonicAccuracy => r.harmonic_accuracy,
            SortMetric::MseAccuracy => r.mse_accuracy,
            SortMetric::TestAuc => r.test_auc,
            SortMetric::HarmonicAuc => r.harmonic_auc,
            SortMetric::MseAuc => r.mse_auc,
        }
    }
}

/// A fully resolved sweep specification.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub train_path: PathBuf,
    pub test_path: PathBuf,
    pub seed: u64,
    pub subsample: Option<f64>,
    /// Threshold grid in percent (converted to fractions internally).
    pub thresholds_percent: Vec<f64>,
    pub pc_counts: Vec<usize>,
    pub classifiers: Vec<ClassifierConfig>,
    pub encoders: Vec<BaselineScheme>,
    pub sort_metric: SortMetric,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    train: String,
    test: String,
    seed: Option<u64>,
    subsample: Option<f64>,
    thresholds: Option<Vec<f64>>,
    pc_counts: Option<Vec<usize>>,
    encoders: Option<Vec<String>>,
    sort_metric: Option<String>,
    classifiers: Option<BTreeMap<String, RawClassifier>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawClassifier {
    seed: Option<u64>,
    c: Option<f64>,
    epochs: Option<usize>,
    tolerance: Option<f64>,
    max_depth: Option<usize>,
    max_features: Option<usize>,
    n_trees: Option<usize>,
    rounds: Option<usize>,
    bootstrap: Option<bool>,
}

impl GridSpec {
    /// Parse and validate a TOML config file.
    pub fn from_toml_path(path: impl AsRef<Path>) -> Result<GridSpec> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<GridSpec> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let seed = raw.seed.unwrap_or(0);

        let thresholds_percent = raw
            .thresholds
            .unwrap_or_else(|| DEFAULT_THRESHOLDS.to_vec());
        for &t in &thresholds_percent {
            if !(t > 0.0 && t <= 50.0) {
                return Err(Error::Config(format!(
                    "thresholds: {t} outside (0, 50] percent"
                )));
            }
        }

        let pc_counts = raw.pc_counts.unwrap_or_else(|| (1..=6).collect());
        for &k in &pc_counts {
            if k == 0 {
                return Err(Error::Config("pc_counts: values must be >= 1".into()));
            }
        }

        let encoders = match raw.encoders {
            None => ALL_SCHEMES.to_vec(),
            Some(labels) => {
                let mut out = Vec::with_capacity(labels.len());
                for label in &labels {
                    let scheme = BaselineScheme::parse(label)
                        .map_err(|_| Error::Config(format!("encoders: unknown scheme '{label}'")))?;
                    if out.contains(&scheme) {
                        return Err(Error::Config(format!("encoders: duplicate '{label}'")));
                    }
                    out.push(scheme);
                }
                out
            }
        };

        let classifiers: Vec<ClassifierConfig> = match raw.classifiers {
            None => ALL_CLASSIFIERS
                .iter()
                .map(|kind| {
                    let mut c = ClassifierConfig::new(*kind);
                    c.seed = seed;
                    c
                })
                .collect(),
            Some(blocks) => {
                for label in blocks.keys() {
                    ClassifierKind::parse(label).map_err(|_| {
                        Error::Config(format!("classifiers: unknown classifier '{label}'"))
                    })?;
                }
                // Canonical order regardless of file order.
                ALL_CLASSIFIERS
                    .iter()
                    .filter_map(|kind| {
                        blocks.get(kind.label()).map(|raw| {
                            let mut c = ClassifierConfig::new(*kind);
                            c.seed = raw.seed.unwrap_or(seed);
                            if let Some(v) = raw.c {
                                c.c = v;
                            }
                            if let Some(v) = raw.epochs {
                                c.epochs = v;
                            }
                            if let Some(v) = raw.tolerance {
                                c.tolerance = v;
                            }
                            c.max_depth = raw.max_depth.or(c.max_depth);
                            c.max_features = raw.max_features.or(c.max_features);
                            c.n_trees = raw.n_trees.or(c.n_trees);
                            c.rounds = raw.rounds.or(c.rounds);
                            if let Some(v) = raw.bootstrap {
                                c.bootstrap = v;
                            }
                            c
                        })
                    })
                    .collect()
            }
        };
        if classifiers.is_empty() {
            return Err(Error::Config("classifiers: at least one required".into()));
        }

        if let Some(f) = raw.subsample {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Config(format!(
                    "subsample: {f} outside (0, 1]"
                )));
            }
        }

        let sort_metric = match raw.sort_metric {
            None => SortMetric::HarmonicAccuracy,
            Some(label) => SortMetric::parse(&label)?,
        };

        Ok(GridSpec {
            train_path: PathBuf::from(raw.train),
            test_path: PathBuf::from(raw.test),
            seed,
            subsample: raw.subsample,
            thresholds_percent,
            pc_counts,
            classifiers,
            encoders,
            sort_metric,
        })
    }

    /// Canonical TOML rendering of the resolved spec, written alongside the
    /// outputs for provenance.
    pub fn to_resolved_toml(&self) -> Result<String> {
        #[derive(Serialize)]
        struct ResolvedClassifier {
            seed: u64,
            c: f64,
            epochs: usize,
            tolerance: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            max_depth: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            max_features: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            n_trees: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            rounds: Option<usize>,
            bootstrap: bool,
        }
        #[derive(Serialize)]
        struct Resolved<'a> {
            train: String,
            test: String,
            seed: u64,
            #[serde(skip_serializing_if = "Option::is_none")]
            subsample: Option<f64>,
            thresholds: &'a [f64],
            pc_counts: &'a [usize],
            encoders: Vec<&'static str>,
            sort_metric: &'static str,
            classifiers: BTreeMap<&'static str, ResolvedClassifier>,
        }
        let resolved = Resolved {
            train: self.train_path.display().to_string(),
            test: self.test_path.display().to_string(),
            seed: self.seed,
            subsample: self.subsample,
            thresholds: &self.thresholds_percent,
            pc_counts: &self.pc_counts,
            encoders: self.encoders.iter().map(|s| s.label()).collect(),
            sort_metric: self.sort_metric.label(),
            classifiers: self
                .classifiers
                .iter()
                .map(|c| {
                    (
                        c.kind.label(),
                        ResolvedClassifier {
                            seed: c.seed,
                            c: c.c,
                            epochs: c.epochs,
                            tolerance: c.tolerance,
                            max_depth: c.max_depth,
                            max_features: c.max_features,
                            n_trees: c.n_trees,
                            rounds: c.rounds,
                            bootstrap: c.bootstrap,
                        },
                    )
                })
                .collect(),
        };
        toml::to_string(&resolved).map_err(|e| Error::Serialization(e.to_string()))
    }
}
