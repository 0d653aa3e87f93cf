//! Benchmark sweep: threshold x component-count x classifier cells for the
//! threshold/PCA encoder, baseline-encoder x classifier cells for the
//! classical schemes, leaderboard selection, and report files.
//!
//! Cells are independent; tasks run in parallel but results are assembled in
//! specification order, so a sweep's output is a pure function of its spec.
//! A failing cell is recorded and skipped, never fatal.

pub mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::ArrayView2;
use rayon::prelude::*;

use crate::baselines::{fit_transform_baseline, BaselineScheme};
use crate::classifiers::{train, ClassifierConfig};
use crate::dataset::{ClassLabel, Dataset, Role};
use crate::encoder::ThresholdPcaEncoder;
use crate::error::{Error, Result};
use crate::metrics::{accuracy, auc, EvalRecord};
use crate::numfmt::fmt_f64;
use crate::stats::{fit_all_stats, CategoryStats};

pub use config::{GridSpec, SortMetric, DEFAULT_THRESHOLDS};

/// Label under which the threshold/PCA encoder appears in records and
/// leaderboards.
pub const PROPOSED_LABEL: &str = "threshold_pca";

/// A cell that could not be evaluated, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct FailedCell {
    pub encoder: String,
    pub classifier: String,
    pub threshold_percent: Option<f64>,
    pub k: Option<usize>,
    pub message: String,
}

/// Leaderboard entry: an encoder's best record plus any other records of the
/// same encoder that tie it exactly on the sort metric.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderboardRow {
    pub record: EvalRecord,
    pub tied: Vec<EvalRecord>,
}

/// Output of a sweep: successful records and failures in spec order, plus
/// the leaderboard under the spec's sort metric.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub records: Vec<EvalRecord>,
    pub failures: Vec<FailedCell>,
    pub leaderboard: Vec<LeaderboardRow>,
    pub sort_metric: SortMetric,
}

struct TaskOutput {
    records: Vec<EvalRecord>,
    failures: Vec<FailedCell>,
}

/// Load the datasets named by the spec (applying the optional stratified
/// subsample) and sweep.
pub fn run_grid(spec: &GridSpec) -> Result<GridResult> {
    let mut train_ds = Dataset::parse_nslkdd(&spec.train_path, Role::Train)?;
    let mut test_ds = Dataset::parse_nslkdd(&spec.test_path, Role::Test)?;
    if let Some(fraction) = spec.subsample {
        train_ds = train_ds.subsample_stratified(fraction, spec.seed)?;
        test_ds = test_ds.subsample_stratified(fraction, spec.seed.wrapping_add(1))?;
    }
    run_grid_on(spec, &train_ds, &test_ds)
}

/// Sweep over already-loaded datasets.
pub fn run_grid_on(spec: &GridSpec, train_ds: &Dataset, test_ds: &Dataset) -> Result<GridResult> {
    let stats = fit_all_stats(train_ds)?;

    let proposed_tasks: Vec<(f64, usize)> = spec
        .thresholds_percent
        .iter()
        .flat_map(|t| spec.pc_counts.iter().map(move |k| (*t, *k)))
        .collect();
    let proposed: Vec<TaskOutput> = proposed_tasks
        .par_iter()
        .map(|(pct, k)| proposed_task(spec, train_ds, test_ds, &stats, *pct, *k))
        .collect();

    let baselines: Vec<TaskOutput> = spec
        .encoders
        .par_iter()
        .map(|scheme| baseline_task(spec, train_ds, test_ds, *scheme))
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for task in proposed.into_iter().chain(baselines) {
        records.extend(task.records);
        failures.extend(task.failures);
    }
    let board = if records.is_empty() {
        Vec::new()
    } else {
        leaderboard(&records, spec.sort_metric)?
    };
    Ok(GridResult {
        records,
        failures,
        leaderboard: board,
        sort_metric: spec.sort_metric,
    })
}

/// Evaluate one encoded design matrix pair under one classifier config.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_cell(
    encoder: &str,
    clf: &ClassifierConfig,
    threshold_percent: Option<f64>,
    k: Option<usize>,
    x_train: ArrayView2<f64>,
    y_train: &[ClassLabel],
    x_test: ArrayView2<f64>,
    y_test: &[ClassLabel],
) -> Result<EvalRecord> {
    let model = train(clf, x_train, y_train)?;
    let threshold = model.decision_threshold();
    let train_scores = model.scores(x_train)?;
    let test_scores = model.scores(x_test)?;
    let to_pred = |scores: &[f64]| -> Vec<ClassLabel> {
        scores
            .iter()
            .map(|s| {
                if *s >= threshold {
                    ClassLabel::Attack
                } else {
                    ClassLabel::Normal
                }
            })
            .collect()
    };
    EvalRecord::from_metrics(
        encoder,
        clf.kind.label(),
        threshold_percent,
        k,
        accuracy(&to_pred(&train_scores), y_train)?,
        accuracy(&to_pred(&test_scores), y_test)?,
        auc(&train_scores, y_train)?,
        auc(&test_scores, y_test)?,
    )
}

fn proposed_task(
    spec: &GridSpec,
    train_ds: &Dataset,
    test_ds: &Dataset,
    stats: &[CategoryStats],
    pct: f64,
    k: usize,
) -> TaskOutput {
    let mut out = TaskOutput {
        records: Vec::new(),
        failures: Vec::new(),
    };
    let fail_all = |out: &mut TaskOutput, message: String| {
        for clf in &spec.classifiers {
            out.failures.push(FailedCell {
                encoder: PROPOSED_LABEL.into(),
                classifier: clf.kind.label().into(),
                threshold_percent: Some(pct),
                k: Some(k),
                message: message.clone(),
            });
        }
    };
    let encoded = ThresholdPcaEncoder::fit_with_stats(train_ds, stats, pct / 100.0, k)
        .and_then(|enc| {
            let x_train = enc.transform(train_ds)?;
            let x_test = enc.transform(test_ds)?;
            Ok((x_train, x_test))
        });
    let (x_train, x_test) = match encoded {
        Ok(pair) => pair,
        Err(e) => {
            fail_all(&mut out, e.to_string());
            return out;
        }
    };
    for clf in &spec.classifiers {
        match evaluate_cell(
            PROPOSED_LABEL,
            clf,
            Some(pct),
            Some(k),
            x_train.view(),
            train_ds.target(),
            x_test.view(),
            test_ds.target(),
        ) {
            Ok(rec) => out.records.push(rec),
            Err(e) => out.failures.push(FailedCell {
                encoder: PROPOSED_LABEL.into(),
                classifier: clf.kind.label().into(),
                threshold_percent: Some(pct),
                k: Some(k),
                message: e.to_string(),
            }),
        }
    }
    out
}

fn baseline_task(
    spec: &GridSpec,
    train_ds: &Dataset,
    test_ds: &Dataset,
    scheme: BaselineScheme,
) -> TaskOutput {
    let mut out = TaskOutput {
        records: Vec::new(),
        failures: Vec::new(),
    };
    let label = scheme.label();
    let encoded = fit_transform_baseline(train_ds, scheme).and_then(|(enc, x_train)| {
        let x_test = enc.transform(test_ds)?;
        Ok((x_train, x_test))
    });
    let (x_train, x_test) = match encoded {
        Ok(pair) => pair,
        Err(e) => {
            for clf in &spec.classifiers {
                out.failures.push(FailedCell {
                    encoder: label.into(),
                    classifier: clf.kind.label().into(),
                    threshold_percent: None,
                    k: None,
                    message: e.to_string(),
                });
            }
            return out;
        }
    };
    for clf in &spec.classifiers {
        match evaluate_cell(
            label,
            clf,
            None,
            None,
            x_train.view(),
            train_ds.target(),
            x_test.view(),
            test_ds.target(),
        ) {
            Ok(rec) => out.records.push(rec),
            Err(e) => out.failures.push(FailedCell {
                encoder: label.into(),
                classifier: clf.kind.label().into(),
                threshold_percent: None,
                k: None,
                message: e.to_string(),
            }),
        }
    }
    out
}

/// True when `a` strictly beats `b` under the metric's direction.
fn beats(sort: SortMetric, a: f64, b: f64) -> bool {
    if sort.ascending() {
        a < b
    } else {
        a > b
    }
}

/// Deterministic preference between equal-valued records of one encoder:
/// classifier label, then threshold, then K.
fn tie_preferred(a: &EvalRecord, b: &EvalRecord) -> bool {
    (
        &a.classifier,
        a.threshold_percent.unwrap_or(f64::NEG_INFINITY),
        a.k.unwrap_or(0),
    )
        .partial_cmp(&(
            &b.classifier,
            b.threshold_percent.unwrap_or(f64::NEG_INFINITY),
            b.k.unwrap_or(0),
        ))
        .unwrap()
        .is_lt()
}

/// One row per encoder: its best record under `sort`, annotated with exact
/// ties; rows ordered best-first, encoder label breaking cross-encoder ties.
pub fn leaderboard(records: &[EvalRecord], sort: SortMetric) -> Result<Vec<LeaderboardRow>> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let mut by_encoder: BTreeMap<&str, Vec<&EvalRecord>> = BTreeMap::new();
    for rec in records {
        by_encoder.entry(&rec.encoder).or_default().push(rec);
    }
    let mut rows: Vec<LeaderboardRow> = by_encoder
        .into_values()
        .map(|group| {
            let mut best = group[0];
            for rec in &group[1..] {
                let v = sort.value(rec);
                let b = sort.value(best);
                if beats(sort, v, b) || (v == b && tie_preferred(rec, best)) {
                    best = rec;
                }
            }
            let tied = group
                .iter()
                .filter(|r| !std::ptr::eq(**r, best) && sort.value(r) == sort.value(best))
                .map(|r| (*r).clone())
                .collect();
            LeaderboardRow {
                record: best.clone(),
                tied,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        let va = sort.value(&a.record);
        let vb = sort.value(&b.record);
        let ord = if sort.ascending() {
            va.partial_cmp(&vb).unwrap()
        } else {
            vb.partial_cmp(&va).unwrap()
        };
        ord.then_with(|| a.record.encoder.cmp(&b.record.encoder))
    });
    Ok(rows)
}

/// Shorthand for a record's hyperparameters, used in tie annotations and the
/// text summary.
fn cell_tag(rec: &EvalRecord) -> String {
    match (rec.threshold_percent, rec.k) {
        (Some(t), Some(k)) => format!("{} thr={t} K={k}", rec.classifier),
        _ => rec.classifier.clone(),
    }
}

/// CSV bodies for the train-vs-test scatter plots and the hyperparameter
/// grid (threshold/PCA cells only). Ideal-point reference rows lead the two
/// scatter files.
pub struct ScatterData {
    pub accuracy: String,
    pub auc: String,
    pub grid: String,
}

pub fn scatter_export(records: &[EvalRecord]) -> ScatterData {
    let mut acc = String::from("train_accuracy,test_accuracy,encoder,classifier\n");
    acc.push_str(&format!(
        "{},{},ideal_point,ideal_point\n",
        fmt_f64(100.0),
        fmt_f64(100.0)
    ));
    let mut auc_csv = String::from("train_auc,test_auc,encoder,classifier\n");
    auc_csv.push_str(&format!(
        "{},{},ideal_point,ideal_point\n",
        fmt_f64(1.0),
        fmt_f64(1.0)
    ));
    let mut grid = String::from("threshold_percent,k,classifier,train_accuracy,test_accuracy\n");
    for rec in records {
        acc.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(rec.train_accuracy),
            fmt_f64(rec.test_accuracy),
            rec.encoder,
            rec.classifier
        ));
        auc_csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(rec.train_auc),
            fmt_f64(rec.test_auc),
            rec.encoder,
            rec.classifier
        ));
        if let (Some(t), Some(k)) = (rec.threshold_percent, rec.k) {
            grid.push_str(&format!(
                "{},{k},{},{},{}\n",
                fmt_f64(t),
                rec.classifier,
                fmt_f64(rec.train_accuracy),
                fmt_f64(rec.test_accuracy)
            ));
        }
    }
    ScatterData {
        accuracy: acc,
        auc: auc_csv,
        grid,
    }
}

pub const LEADERBOARD_HEADER: &str = "rank,encoder,classifier,threshold_percent,k,train_accuracy,test_accuracy,train_auc,test_auc,mse_accuracy,mse_auc,harmonic_accuracy,harmonic_auc,tied_hyperparams";

/// Render leaderboard rows as CSV (header included, no comment line).
pub fn leaderboard_csv(rows: &[LeaderboardRow]) -> String {
    let mut out = format!("{LEADERBOARD_HEADER}\n");
    for (i, row) in rows.iter().enumerate() {
        let tied: Vec<String> = row.tied.iter().map(cell_tag).collect();
        out.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            row.record.to_csv_row(),
            tied.join("; ")
        ));
    }
    out
}

/// Write every report file into `dir` (created if needed): `records.csv`,
/// `leaderboard.csv`, the three scatter CSVs, `summary.txt`, and the
/// resolved config. Returns the paths written.
pub fn write_outputs(dir: &Path, spec: &GridSpec, result: &GridResult) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let comment = format!(
        "# catenc {} seed={}\n",
        env!("CARGO_PKG_VERSION"),
        spec.seed
    );
    let mut written = Vec::new();
    let mut emit = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, format!("{comment}{body}"))
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        written.push(path);
        Ok(())
    };

    let mut records_csv = format!("{}\n", EvalRecord::CSV_HEADER);
    for rec in &result.records {
        records_csv.push_str(&rec.to_csv_row());
        records_csv.push('\n');
    }
    emit("records.csv", records_csv)?;

    emit("leaderboard.csv", leaderboard_csv(&result.leaderboard))?;

    let scatter = scatter_export(&result.records);
    emit("scatter_accuracy.csv", scatter.accuracy)?;
    emit("scatter_auc.csv", scatter.auc)?;
    emit("grid_scatter.csv", scatter.grid)?;

    let attempted = result.records.len() + result.failures.len();
    let mut summary = format!(
        "catenc {} benchmark summary\nseed: {}\ntrain: {}\ntest: {}\nsort metric: {}\ncells: {} attempted, {} succeeded, {} failed\n",
        env!("CARGO_PKG_VERSION"),
        spec.seed,
        spec.train_path.display(),
        spec.test_path.display(),
        result.sort_metric.label(),
        attempted,
        result.records.len(),
        result.failures.len(),
    );
    summary.push_str("\nleaderboard:\n");
    for (i, row) in result.leaderboard.iter().enumerate() {
        summary.push_str(&format!(
            "  {:>2}. {:<28} {:<20} {}={:.4}\n",
            i + 1,
            row.record.encoder,
            cell_tag(&row.record),
            result.sort_metric.label(),
            result.sort_metric.value(&row.record)
        ));
    }
    if !result.failures.is_empty() {
        summary.push_str("\nfailed cells:\n");
        for f in &result.failures {
            let tag = match (f.threshold_percent, f.k) {
                (Some(t), Some(k)) => format!("{} {} thr={t} K={k}", f.encoder, f.classifier),
                _ => format!("{} {}", f.encoder, f.classifier),
            };
            summary.push_str(&format!("  {tag}: {}\n", f.message));
        }
    }
    emit("summary.txt", summary)?;

    emit("config_resolved.toml", spec.to_resolved_toml()?)?;
    Ok(written)
}
