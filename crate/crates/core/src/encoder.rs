//! Supervised categorical encoder: per-category conditional probabilities are
//! thresholded into one of three indicator states per variable, the resulting
//! 2N indicator columns are decorrelated by PCA, and the retained component
//! scores are standardized with training statistics.
//!
//! Two hyperparameters drive the encoder: the probability `threshold` (a
//! fraction in [0, 0.5]) and the retained component count `k` (clamped to the
//! number of usable components).

use std::collections::{BTreeMap, HashMap};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::dataset::{CategoryId, Dataset};
use crate::error::{Error, Result};
use crate::numfmt;
use crate::pca::{fit_pca, PcaModel};
use crate::stats::{fit_all_stats, CategoryStats};

/// Version tag carried by every serialized encoder document.
pub const ENCODER_FORMAT: &str = "catenc-encoder/1";

/// Indicator pair assigned to a category. `(1,1)` never occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "[u8; 2]", try_from = "[u8; 2]")]
pub enum IndicatorState {
    /// (1, 0): the normal class dominates and the attack side clears the
    /// threshold.
    MajorityNormal,
    /// (0, 1): the attack class dominates and the normal side clears the
    /// threshold.
    MajorityAttack,
    /// (0, 0): rare-side probability at or below the threshold, a tie, or a
    /// category unseen at fit time.
    Neutral,
}

impl IndicatorState {
    pub fn as_pair(self) -> (f64, f64) {
        match self {
            IndicatorState::MajorityNormal => (1.0, 0.0),
            IndicatorState::MajorityAttack => (0.0, 1.0),
            IndicatorState::Neutral => (0.0, 0.0),
        }
    }
}

impl From<IndicatorState> for [u8; 2] {
    fn from(s: IndicatorState) -> [u8; 2] {
        match s {
            IndicatorState::MajorityNormal => [1, 0],
            IndicatorState::MajorityAttack => [0, 1],
            IndicatorState::Neutral => [0, 0],
        }
    }
}

impl TryFrom<[u8; 2]> for IndicatorState {
    type Error = String;
    fn try_from(v: [u8; 2]) -> std::result::Result<Self, String> {
        match v {
            [1, 0] => Ok(IndicatorState::MajorityNormal),
            [0, 1] => Ok(IndicatorState::MajorityAttack),
            [0, 0] => Ok(IndicatorState::Neutral),
            other => Err(format!("invalid indicator state {other:?}")),
        }
    }
}

/// The three-state rule applied to one category's (p1, p2).
///
/// Dominant-side rows require strict inequalities; a rare-side probability
/// equal to the threshold falls through to `Neutral`, as does a p1 == p2 tie.
/// This makes the rule total for every input with p1 + p2 = 1.
pub fn classify_category(p1: f64, p2: f64, threshold: f64) -> IndicatorState {
    if p1 > p2 && p2 > threshold {
        IndicatorState::MajorityNormal
    } else if p1 < p2 && p1 > threshold {
        IndicatorState::MajorityAttack
    } else {
        IndicatorState::Neutral
    }
}

/// Category-to-state tables for every variable, keyed by resolved category
/// string so they apply across datasets with different intern tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMap {
    threshold: f64,
    variables: Vec<VariableStates>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableStates {
    pub variable: String,
    pub states: BTreeMap<String, IndicatorState>,
}

impl ThresholdMap {
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn variables(&self) -> &[VariableStates] {
        &self.variables
    }

    /// Number of indicator columns (two per variable).
    pub fn indicator_width(&self) -> usize {
        2 * self.variables.len()
    }

    pub fn state_of(&self, variable: &str, category: &str) -> Option<IndicatorState> {
        self.variables
            .iter()
            .find(|v| v.variable == variable)
            .and_then(|v| v.states.get(category).copied())
    }
}

/// Apply the three-state rule to every fitted category.
pub fn build_threshold_map(stats: &[CategoryStats], threshold: f64) -> Result<ThresholdMap> {
    if !(0.0..=0.5).contains(&threshold) {
        return Err(Error::ThresholdOutOfRange(threshold));
    }
    let variables = stats
        .iter()
        .map(|s| {
            let states = s
                .records()
                .iter()
                .map(|r| (r.name.clone(), classify_category(r.p1, r.p2, threshold)))
                .collect();
            VariableStates {
                variable: s.variable().to_string(),
                states,
            }
        })
        .collect();
    Ok(ThresholdMap {
        threshold,
        variables,
    })
}

/// Expand a dataset into its `n_rows x 2N` indicator matrix. Variable `i`
/// fills columns `2i` and `2i+1`; categories absent from the map contribute
/// `(0, 0)`.
pub fn expand_indicators(ds: &Dataset, map: &ThresholdMap) -> Result<Array2<f64>> {
    let n = ds.n_rows();
    let mut columns = Vec::with_capacity(map.variables.len());
    for var in &map.variables {
        columns.push(ds.categorical_column(&var.variable).map_err(|_| {
            Error::SchemaMismatch(format!(
                "variable '{}' missing or not categorical in dataset",
                var.variable
            ))
        })?);
    }
    let mut out = Array2::zeros((n, map.indicator_width()));
    for (vi, var) in map.variables.iter().enumerate() {
        let col = columns[vi];
        let mut cache: HashMap<CategoryId, (f64, f64)> = HashMap::new();
        for row in 0..n {
            let id = ds.category_at(row, col);
            let pair = *cache.entry(id).or_insert_with(|| {
                var.states
                    .get(ds.resolve(id))
                    .copied()
                    .unwrap_or(IndicatorState::Neutral)
                    .as_pair()
            });
            out[(row, 2 * vi)] = pair.0;
            out[(row, 2 * vi + 1)] = pair.1;
        }
    }
    Ok(out)
}

/// Per-column shift/scale fitted on training scores (population standard
/// deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<f64>) -> Result<Self> {
        let n = x.nrows() as f64;
        let mut means = Vec::with_capacity(x.ncols());
        let mut stds = Vec::with_capacity(x.ncols());
        for (j, col) in x.columns().into_iter().enumerate() {
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let std = var.sqrt();
            if std <= 0.0 {
                return Err(Error::ZeroVariance(j));
            }
            means.push(mean);
            stds.push(std);
        }
        Ok(Standardizer { means, stds })
    }

    pub fn apply(&self, x: &mut Array2<f64>) {
        for (j, (&m, &s)) in self.means.iter().zip(&self.stds).enumerate() {
            for v in x.column_mut(j) {
                *v = (*v - m) / s;
            }
        }
    }
}

/// Fully fitted encoder: threshold map + PCA basis + standardizer.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPcaEncoder {
    map: ThresholdMap,
    pca: PcaModel,
    standardizer: Standardizer,
    k_requested: usize,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct EncoderDoc {
    format: String,
    scheme: String,
    threshold: f64,
    variables: Vec<VariableStates>,
    pca: PcaModel,
    k_requested: usize,
    k: usize,
    standardizer: Standardizer,
}

impl ThresholdPcaEncoder {
    /// Fit on a training split. `k` is clamped to the number of usable
    /// principal components; the requested value is kept for reporting.
    pub fn fit(train: &Dataset, threshold: f64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParam("component count must be >= 1".into()));
        }
        let stats = fit_all_stats(train)?;
        if stats.is_empty() {
            return Err(Error::SchemaMismatch(
                "dataset has no categorical variables".into(),
            ));
        }
        Self::fit_with_stats(train, &stats, threshold, k)
    }

    /// Same as [`fit`](Self::fit) but reuses pre-computed category stats
    /// (the grid harness fits them once per sweep).
    pub fn fit_with_stats(
        train: &Dataset,
        stats: &[CategoryStats],
        threshold: f64,
        k: usize,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParam("component count must be >= 1".into()));
        }
        let map = build_threshold_map(stats, threshold)?;
        let indicators = expand_indicators(train, &map)?;
        let pca = fit_pca(indicators.view())?;
        let k_eff = k.min(pca.n_components());
        let scores = pca.project(indicators.view(), k_eff)?;
        let standardizer = Standardizer::fit(scores.view())?;
        Ok(ThresholdPcaEncoder {
            map,
            pca,
            standardizer,
            k_requested: k,
            k: k_eff,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.map.threshold
    }

    /// Requested component count before clamping.
    pub fn k_requested(&self) -> usize {
        self.k_requested
    }

    /// Effective component count; equals the transform output width.
    pub fn output_dim(&self) -> usize {
        self.k
    }

    pub fn map(&self) -> &ThresholdMap {
        &self.map
    }

    pub fn pca(&self) -> &PcaModel {
        &self.pca
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    /// Column labels for the encoded matrix.
    pub fn column_names(&self) -> Vec<String> {
        (1..=self.k).map(|i| format!("pc{i}")).collect()
    }

    /// Indicators -> center/project with the fitted PCA -> standardize with
    /// the train-fitted scale.
    pub fn transform(&self, ds: &Dataset) -> Result<Array2<f64>> {
        let indicators = expand_indicators(ds, &self.map)?;
        let mut scores = self.pca.project(indicators.view(), self.k)?;
        self.standardizer.apply(&mut scores);
        Ok(scores)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = EncoderDoc {
            format: ENCODER_FORMAT.to_string(),
            scheme: "threshold_pca".to_string(),
            threshold: self.map.threshold,
            variables: self.map.variables.clone(),
            pca: self.pca.clone(),
            k_requested: self.k_requested,
            k: self.k,
            standardizer: self.standardizer.clone(),
        };
        numfmt::to_json_string(&doc)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: EncoderDoc = numfmt::from_json_str(s)?;
        if doc.format != ENCODER_FORMAT {
            return Err(Error::Serialization(format!(
                "unsupported encoder format '{}'",
                doc.format
            )));
        }
        if doc.scheme != "threshold_pca" {
            return Err(Error::Serialization(format!(
                "expected scheme 'threshold_pca', found '{}'",
                doc.scheme
            )));
        }
        Ok(ThresholdPcaEncoder {
            map: ThresholdMap {
                threshold: doc.threshold,
                variables: doc.variables,
            },
            pca: doc.pca,
            standardizer: doc.standardizer,
            k_requested: doc.k_requested,
            k: doc.k,
        })
    }
}
