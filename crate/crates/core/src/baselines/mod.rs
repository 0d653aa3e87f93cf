//! Classical category encoders used as benchmark baselines: identity-style
//! codings (one-hot, ordinal, count, base-N, hashing), target statistics
//! (target, m-estimate, James-Stein, leave-one-out, ordered-CatBoost, weight
//! of evidence), and contrast codings (sum, Helmert, backward difference,
//! polynomial).
//!
//! All encoders share a fit/transform split. Leave-one-out and
//! ordered-CatBoost additionally distinguish `fit_transform` (row-dependent
//! training-set encoding) from `transform` (per-category lookup used for any
//! other data).

pub mod contrast;

use std::collections::HashMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::{CategoryId, ClassLabel, Dataset};
use crate::encoder::ENCODER_FORMAT;
use crate::error::{Error, Result};
use crate::numfmt;
use crate::stats::{fit_all_stats, CategoryStats};

/// Baseline encoding scheme, with per-scheme parameters where applicable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BaselineScheme {
    OneHot,
    Ordinal,
    Count,
    /// Base-2 positional coding of the ordinal code (alias of `base_n` with
    /// base 2, kept as its own label).
    Binary,
    BaseN {
        base: u32,
    },
    /// Feature hashing shared across variables: each category hashes to one
    /// of `n_buckets` columns and a row holds the indicator sum.
    Hashing {
        n_buckets: usize,
    },
    /// Smoothed class-2 mean with sigmoid shrinkage
    /// `lambda = 1 / (1 + exp(-(n - k) / f))`.
    Target {
        k: f64,
        f: f64,
    },
    /// `(count_c2 + m * prior) / (count + m)`.
    MEstimate {
        m: f64,
    },
    /// Shrinkage toward the prior with a variance-ratio weight.
    JamesStein,
    /// Category mean; on the training set each row excludes itself.
    LeaveOneOut,
    /// Running prior-smoothed class-2 statistic over the natural row order.
    CatboostOrdered,
    /// `ln(p(cat | C2) / p(cat | C1))` with additive 0.5 smoothing.
    Woe,
    SumContrast,
    HelmertContrast,
    BackwardDifferenceContrast,
    PolynomialContrast,
}

/// Every scheme label in a stable presentation order, with default params.
pub const ALL_SCHEMES: [BaselineScheme; 16] = [
    BaselineScheme::OneHot,
    BaselineScheme::Ordinal,
    BaselineScheme::Count,
    BaselineScheme::Binary,
    BaselineScheme::BaseN { base: 2 },
    BaselineScheme::Hashing { n_buckets: 8 },
    BaselineScheme::Target { k: 20.0, f: 10.0 },
    BaselineScheme::MEstimate { m: 1.0 },
    BaselineScheme::JamesStein,
    BaselineScheme::LeaveOneOut,
    BaselineScheme::CatboostOrdered,
    BaselineScheme::Woe,
    BaselineScheme::SumContrast,
    BaselineScheme::HelmertContrast,
    BaselineScheme::BackwardDifferenceContrast,
    BaselineScheme::PolynomialContrast,
];

impl BaselineScheme {
    /// Stable label used in CLI flags, config files, and report columns.
    pub fn label(&self) -> &'static str {
        match self {
            BaselineScheme::OneHot => "one_hot",
            BaselineScheme::Ordinal => "ordinal",
            BaselineScheme::Count => "count",
            BaselineScheme::Binary => "binary",
            BaselineScheme::BaseN { .. } => "base_n",
            BaselineScheme::Hashing { .. } => "hashing",
            BaselineScheme::Target { .. } => "target",
            BaselineScheme::MEstimate { .. } => "m_estimate",
            BaselineScheme::JamesStein => "james_stein",
            BaselineScheme::LeaveOneOut => "leave_one_out",
            BaselineScheme::CatboostOrdered => "catboost_ordered",
            BaselineScheme::Woe => "woe",
            BaselineScheme::SumContrast => "sum_contrast",
            BaselineScheme::HelmertContrast => "helmert_contrast",
            BaselineScheme::BackwardDifferenceContrast => "backward_difference_contrast",
            BaselineScheme::PolynomialContrast => "polynomial_contrast",
        }
    }

    /// Parse a label, applying default parameters (base 2, 8 buckets,
    /// m = 1, target k = 20 / f = 10).
    pub fn parse(label: &str) -> Result<BaselineScheme> {
        ALL_SCHEMES
            .iter()
            .find(|s| s.label() == label)
            .copied()
            .ok_or_else(|| Error::UnknownScheme(label.to_string()))
    }

    // The negated comparisons also reject NaN parameters, which plain
    // `<`/`<=` would let through.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        match self {
            BaselineScheme::BaseN { base } if *base < 2 => Err(Error::InvalidParam(format!(
                "base_n base must be >= 2, got {base}"
            ))),
            BaselineScheme::Hashing { n_buckets } if *n_buckets < 1 => Err(Error::InvalidParam(
                "hashing needs at least 1 bucket".into(),
            )),
            BaselineScheme::MEstimate { m } if !(*m >= 0.0) => Err(Error::InvalidParam(format!(
                "m_estimate m must be >= 0, got {m}"
            ))),
            BaselineScheme::Target { k, f } if !k.is_finite() || !(*f > 0.0) => Err(
                Error::InvalidParam(format!("target smoothing needs finite k and f > 0, got k={k} f={f}")),
            ),
            _ => Ok(()),
        }
    }

}

/// One variable's fitted lookup table. `values[i]` is the block for
/// `categories[i]` (first-appearance order); `unseen` is the block used for
/// categories missing from the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedVariable {
    pub name: String,
    pub categories: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub width: usize,
    pub unseen: Vec<f64>,
}

/// A fitted baseline encoder: immutable per-variable tables plus the global
/// class-2 prior.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedBaseline {
    scheme: BaselineScheme,
    prior: f64,
    variables: Vec<EncodedVariable>,
    output_dim: usize,
}

#[derive(Serialize, Deserialize)]
struct BaselineDoc {
    format: String,
    scheme: BaselineScheme,
    prior: f64,
    output_dim: usize,
    variables: Vec<EncodedVariable>,
}

/// 64-bit FNV-1a over the raw category string: the stable, documented hash
/// behind the hashing encoder.
pub fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn class2_prior(ds: &Dataset) -> f64 {
    let attacks = ds
        .target()
        .iter()
        .filter(|l| **l == ClassLabel::Attack)
        .count();
    attacks as f64 / ds.n_rows() as f64
}

/// Positional digits of `code` in `base`, most significant first, padded to
/// `width`.
fn digits(code: u64, base: u64, width: usize) -> Vec<f64> {
    let mut out = vec![0.0; width];
    let mut v = code;
    for slot in out.iter_mut().rev() {
        *slot = (v % base) as f64;
        v /= base;
    }
    out
}

fn digit_width(max_code: u64, base: u64) -> usize {
    let mut width = 1;
    let mut v = max_code / base;
    while v > 0 {
        width += 1;
        v /= base;
    }
    width
}

fn fit_variable(scheme: &BaselineScheme, stats: &CategoryStats, prior: f64) -> EncodedVariable {
    let records = stats.records();
    let c = records.len();
    let categories: Vec<String> = records.iter().map(|r| r.name.clone()).collect();
    let (width, values, unseen): (usize, Vec<Vec<f64>>, Vec<f64>) = match scheme {
        BaselineScheme::OneHot => {
            let values = (0..c)
                .map(|i| {
                    let mut row = vec![0.0; c];
                    row[i] = 1.0;
                    row
                })
                .collect();
            (c, values, vec![0.0; c])
        }
        BaselineScheme::Ordinal => {
            let values = (0..c).map(|i| vec![(i + 1) as f64]).collect();
            (1, values, vec![0.0])
        }
        BaselineScheme::Count => {
            let values = records.iter().map(|r| vec![r.count_total as f64]).collect();
            (1, values, vec![0.0])
        }
        BaselineScheme::Binary | BaselineScheme::BaseN { .. } => {
            let base = match scheme {
                BaselineScheme::BaseN { base } => u64::from(*base),
                _ => 2,
            };
            let width = digit_width(c as u64, base);
            let values = (0..c)
                .map(|i| digits((i + 1) as u64, base, width))
                .collect();
            (width, values, vec![0.0; width])
        }
        BaselineScheme::Hashing { n_buckets } => {
            let values = categories
                .iter()
                .map(|name| {
                    let mut row = vec![0.0; *n_buckets];
                    row[(fnv1a64(name) % *n_buckets as u64) as usize] = 1.0;
                    row
                })
                .collect();
            // Unseen strings are hashed at transform time, never looked up.
            (*n_buckets, values, vec![0.0; *n_buckets])
        }
        BaselineScheme::Target { k, f } => {
            let values = records
                .iter()
                .map(|r| {
                    let n = r.count_total as f64;
                    let lambda = 1.0 / (1.0 + (-(n - k) / f).exp());
                    vec![lambda * r.p2 + (1.0 - lambda) * prior]
                })
                .collect();
            (1, values, vec![prior])
        }
        BaselineScheme::MEstimate { m } => {
            let values = records
                .iter()
                .map(|r| vec![(r.count_c2 as f64 + m * prior) / (r.count_total as f64 + m)])
                .collect();
            (1, values, vec![prior])
        }
        BaselineScheme::JamesStein => {
            // Between-category variance of the class-2 means around the prior.
            let tau2 = records
                .iter()
                .map(|r| (r.p2 - prior) * (r.p2 - prior))
                .sum::<f64>()
                / c as f64;
            let values = records
                .iter()
                .map(|r| {
                    // Squared standard error of this category's mean.
                    let s2 = r.p2 * (1.0 - r.p2) / r.count_total as f64;
                    let b = if s2 + tau2 > 0.0 { s2 / (s2 + tau2) } else { 0.0 };
                    vec![(1.0 - b) * r.p2 + b * prior]
                })
                .collect();
            (1, values, vec![prior])
        }
        BaselineScheme::LeaveOneOut => {
            let values = records.iter().map(|r| vec![r.p2]).collect();
            (1, values, vec![prior])
        }
        BaselineScheme::CatboostOrdered => {
            let values = records
                .iter()
                .map(|r| vec![(r.count_c2 as f64 + prior) / (r.count_total as f64 + 1.0)])
                .collect();
            (1, values, vec![prior])
        }
        BaselineScheme::Woe => {
            let n1: f64 = records.iter().map(|r| r.count_c1 as f64).sum();
            let n2: f64 = records.iter().map(|r| r.count_c2 as f64).sum();
            let values = records
                .iter()
                .map(|r| {
                    let p_c2 = (r.count_c2 as f64 + 0.5) / (n2 + 0.5);
                    let p_c1 = (r.count_c1 as f64 + 0.5) / (n1 + 0.5);
                    vec![(p_c2 / p_c1).ln()]
                })
                .collect();
            (1, values, vec![0.0])
        }
        BaselineScheme::SumContrast => {
            let m = contrast::sum_matrix(c);
            (c.saturating_sub(1), m, vec![0.0; c.saturating_sub(1)])
        }
        BaselineScheme::HelmertContrast => {
            let m = contrast::helmert_matrix(c);
            (c.saturating_sub(1), m, vec![0.0; c.saturating_sub(1)])
        }
        BaselineScheme::BackwardDifferenceContrast => {
            let m = contrast::backward_difference_matrix(c);
            (c.saturating_sub(1), m, vec![0.0; c.saturating_sub(1)])
        }
        BaselineScheme::PolynomialContrast => {
            let m = contrast::polynomial_matrix(c);
            (c.saturating_sub(1), m, vec![0.0; c.saturating_sub(1)])
        }
    };
    EncodedVariable {
        name: stats.variable().to_string(),
        categories,
        values,
        width,
        unseen,
    }
}

fn fit_from_stats(
    scheme: BaselineScheme,
    stats: &[CategoryStats],
    prior: f64,
) -> Result<FittedBaseline> {
    scheme.validate()?;
    if stats.is_empty() {
        return Err(Error::SchemaMismatch(
            "dataset has no categorical variables".into(),
        ));
    }
    let variables: Vec<EncodedVariable> = stats
        .iter()
        .map(|s| fit_variable(&scheme, s, prior))
        .collect();
    let output_dim = match scheme {
        BaselineScheme::Hashing { n_buckets } => n_buckets,
        _ => variables.iter().map(|v| v.width).sum(),
    };
    Ok(FittedBaseline {
        scheme,
        prior,
        variables,
        output_dim,
    })
}

/// Fit a baseline encoder on a training split.
pub fn fit_baseline(train: &Dataset, scheme: BaselineScheme) -> Result<FittedBaseline> {
    let stats = fit_all_stats(train)?;
    fit_from_stats(scheme, &stats, class2_prior(train))
}

/// Fit and encode the training split in one step. For leave-one-out and
/// ordered-CatBoost the returned matrix uses the row-dependent training
/// semantics; for every other scheme it equals `transform` of the train set.
pub fn fit_transform_baseline(
    train: &Dataset,
    scheme: BaselineScheme,
) -> Result<(FittedBaseline, Array2<f64>)> {
    let stats = fit_all_stats(train)?;
    let prior = class2_prior(train);
    let fitted = fit_from_stats(scheme, &stats, prior)?;
    let matrix = match scheme {
        BaselineScheme::LeaveOneOut => loo_train_matrix(train, &stats, prior)?,
        BaselineScheme::CatboostOrdered => catboost_train_matrix(train, &stats, prior)?,
        _ => fitted.transform(train)?,
    };
    Ok((fitted, matrix))
}

fn loo_train_matrix(
    train: &Dataset,
    stats: &[CategoryStats],
    prior: f64,
) -> Result<Array2<f64>> {
    let n = train.n_rows();
    let mut out = Array2::zeros((n, stats.len()));
    for (vi, var_stats) in stats.iter().enumerate() {
        let col = train.categorical_column(var_stats.variable())?;
        // (count_total, count_c2) per category id of this training set.
        let mut counts: HashMap<CategoryId, (f64, f64)> = HashMap::new();
        for r in var_stats.records() {
            counts.insert(r.category, (r.count_total as f64, r.count_c2 as f64));
        }
        for row in 0..n {
            let (n_cat, c2) = counts[&train.category_at(row, col)];
            let y = f64::from(train.target()[row] == ClassLabel::Attack);
            out[(row, vi)] = if n_cat <= 1.0 {
                prior
            } else {
                (c2 - y) / (n_cat - 1.0)
            };
        }
    }
    Ok(out)
}

fn catboost_train_matrix(
    train: &Dataset,
    stats: &[CategoryStats],
    prior: f64,
) -> Result<Array2<f64>> {
    let n = train.n_rows();
    let mut out = Array2::zeros((n, stats.len()));
    for (vi, var_stats) in stats.iter().enumerate() {
        let col = train.categorical_column(var_stats.variable())?;
        // Running (rows seen, class-2 rows seen) per category, natural order.
        let mut running: HashMap<CategoryId, (f64, f64)> = HashMap::new();
        for row in 0..n {
            let id = train.category_at(row, col);
            let entry = running.entry(id).or_insert((0.0, 0.0));
            out[(row, vi)] = (entry.1 + prior) / (entry.0 + 1.0);
            entry.0 += 1.0;
            entry.1 += f64::from(train.target()[row] == ClassLabel::Attack);
        }
    }
    Ok(out)
}

impl FittedBaseline {
    pub fn scheme(&self) -> BaselineScheme {
        self.scheme
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn variables(&self) -> &[EncodedVariable] {
        &self.variables
    }

    /// Column labels for the encoded matrix, in output order.
    pub fn column_names(&self) -> Vec<String> {
        if let BaselineScheme::Hashing { n_buckets } = self.scheme {
            return (0..n_buckets).map(|i| format!("h{i}")).collect();
        }
        let mut names = Vec::with_capacity(self.output_dim);
        for var in &self.variables {
            match self.scheme {
                BaselineScheme::OneHot => {
                    for cat in &var.categories {
                        names.push(format!("{}={cat}", var.name));
                    }
                }
                BaselineScheme::Binary | BaselineScheme::BaseN { .. } => {
                    for i in 0..var.width {
                        names.push(format!("{}_d{i}", var.name));
                    }
                }
                BaselineScheme::SumContrast
                | BaselineScheme::HelmertContrast
                | BaselineScheme::BackwardDifferenceContrast
                | BaselineScheme::PolynomialContrast => {
                    for i in 0..var.width {
                        names.push(format!("{}_c{}", var.name, i + 1));
                    }
                }
                _ => names.push(var.name.clone()),
            }
        }
        names
    }

    /// Encode a dataset with the per-category tables (test semantics for the
    /// row-dependent schemes).
    pub fn transform(&self, ds: &Dataset) -> Result<Array2<f64>> {
        let n = ds.n_rows();
        let mut cols = Vec::with_capacity(self.variables.len());
        for var in &self.variables {
            cols.push(ds.categorical_column(&var.name).map_err(|_| {
                Error::SchemaMismatch(format!(
                    "variable '{}' missing or not categorical in dataset",
                    var.name
                ))
            })?);
        }
        let mut out = Array2::zeros((n, self.output_dim));
        if let BaselineScheme::Hashing { n_buckets } = self.scheme {
            for (var, &col) in self.variables.iter().zip(&cols) {
                let _ = var;
                let mut bucket_of: HashMap<CategoryId, usize> = HashMap::new();
                for row in 0..n {
                    let id = ds.category_at(row, col);
                    let bucket = *bucket_of
                        .entry(id)
                        .or_insert_with(|| (fnv1a64(ds.resolve(id)) % n_buckets as u64) as usize);
                    out[(row, bucket)] += 1.0;
                }
            }
            return Ok(out);
        }
        let mut offset = 0;
        for (var, &col) in self.variables.iter().zip(&cols) {
            let index_of: HashMap<&str, usize> = var
                .categories
                .iter()
                .enumerate()
                .map(|(i, name)| (name.as_str(), i))
                .collect();
            let mut block_of: HashMap<CategoryId, Option<usize>> = HashMap::new();
            for row in 0..n {
                let id = ds.category_at(row, col);
                let slot = *block_of
                    .entry(id)
                    .or_insert_with(|| index_of.get(ds.resolve(id)).copied());
                let block = match slot {
                    Some(i) => &var.values[i],
                    None => &var.unseen,
                };
                for (j, v) in block.iter().enumerate() {
                    out[(row, offset + j)] = *v;
                }
            }
            offset += var.width;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = BaselineDoc {
            format: ENCODER_FORMAT.to_string(),
            scheme: self.scheme,
            prior: self.prior,
            output_dim: self.output_dim,
            variables: self.variables.clone(),
        };
        numfmt::to_json_string(&doc)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: BaselineDoc = numfmt::from_json_str(s)?;
        if doc.format != ENCODER_FORMAT {
            return Err(Error::Serialization(format!(
                "unsupported encoder format '{}'",
                doc.format
            )));
        }
        doc.scheme.validate()?;
        let expected = match doc.scheme {
            BaselineScheme::Hashing { n_buckets } => n_buckets,
            _ => doc.variables.iter().map(|v| v.width).sum(),
        };
        if expected != doc.output_dim {
            return Err(Error::Serialization(format!(
                "output_dim {} inconsistent with variable widths (expected {expected})",
                doc.output_dim
            )));
        }
        Ok(FittedBaseline {
            scheme: doc.scheme,
            prior: doc.prior,
            variables: doc.variables,
            output_dim: doc.output_dim,
        })
    }
}
