//! Evaluation metrics: accuracy (percent), rank-based ROC AUC, squared
//! distance to the ideal train/test point, and the harmonic average of a
//! train/test pair. `EvalRecord` bundles one benchmark cell's metrics with a
//! stable CSV row format.

use crate::dataset::ClassLabel;
use crate::error::{Error, Result};
use crate::numfmt::fmt_f64;

/// Percent of predictions equal to truth.
pub fn accuracy(pred: &[ClassLabel], truth: &[ClassLabel]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(Error::NoRecords);
    }
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(100.0 * correct as f64 / pred.len() as f64)
}

/// ROC AUC by the Mann-Whitney rank statistic: the probability that a random
/// attack row outscores a random normal row, ties counting one half.
pub fn auc(scores: &[f64], truth: &[ClassLabel]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::LengthMismatch(scores.len(), truth.len()));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidParam(format!("non-finite score {bad}")));
    }
    let n_pos = truth.iter().filter(|l| **l == ClassLabel::Attack).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(a.cmp(&b)));
    // Average ranks over tied score groups, then sum positive-class ranks.
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1 share the average.
        let avg_rank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if truth[idx] == ClassLabel::Attack {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Half the squared distance of a train/test accuracy pair from (100, 100).
pub fn mse_to_ideal_accuracy(a: f64, b: f64) -> Result<f64> {
    for v in [a, b] {
        if !(0.0..=100.0).contains(&v) {
            return Err(Error::MetricOutOfRange {
                value: v,
                lo: 0.0,
                hi: 100.0,
            });
        }
    }
    Ok(0.5 * ((100.0 - a) * (100.0 - a) + (100.0 - b) * (100.0 - b)))
}

/// Half the squared distance of a train/test AUC pair from (1, 1).
pub fn mse_to_ideal_auc(c: f64, d: f64) -> Result<f64> {
    for v in [c, d] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::MetricOutOfRange {
                value: v,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    Ok(0.5 * ((1.0 - c) * (1.0 - c) + (1.0 - d) * (1.0 - d)))
}

/// `2ef / (e + f)`; penalizes train/test imbalance more than the arithmetic
/// mean.
// The negated comparisons also reject NaN inputs, which `<=` would let
// through.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn harmonic_avg(e: f64, f: f64) -> Result<f64> {
    if !(e > 0.0) || !(f > 0.0) {
        return Err(Error::NonPositiveInput(e, f));
    }
    Ok(2.0 * e * f / (e + f))
}

/// One benchmark cell: an encoder/classifier pair with its hyperparameters
/// (for the threshold/PCA encoder) and all derived metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub encoder: String,
    pub classifier: String,
    pub threshold_percent: Option<f64>,
    pub k: Option<usize>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub train_auc: f64,
    pub test_auc: f64,
    pub mse_accuracy: f64,
    pub mse_auc: f64,
    pub harmonic_accuracy: f64,
    pub harmonic_auc: f64,
}

impl EvalRecord {
    pub const CSV_HEADER: &'static str = "encoder,classifier,threshold_percent,k,train_accuracy,test_accuracy,train_auc,test_auc,mse_accuracy,mse_auc,harmonic_accuracy,harmonic_auc";

    /// Build a record from the four base metrics, deriving the ideal-point
    /// and harmonic trade-off metrics.
    #[allow(clippy::too_many_arguments)]
    pub fn from_metrics(
        encoder: impl Into<String>,
        classifier: impl Into<String>,
        threshold_percent: Option<f64>,
        k: Option<usize>,
        train_accuracy: f64,
        test_accuracy: f64,
        train_auc: f64,
        test_auc: f64,
    ) -> Result<EvalRecord> {
        Ok(EvalRecord {
            encoder: encoder.into(),
            classifier: classifier.into(),
            threshold_percent,
            k,
            train_accuracy,
            test_accuracy,
            train_auc,
            test_auc,
            mse_accuracy: mse_to_ideal_accuracy(train_accuracy, test_accuracy)?,
            mse_auc: mse_to_ideal_auc(train_auc, test_auc)?,
            harmonic_accuracy: harmonic_avg(train_accuracy, test_accuracy)?,
            harmonic_auc: harmonic_avg(train_auc, test_auc)?,
        })
    }

    pub fn to_csv_row(&self) -> String {
        let threshold = self
            .threshold_percent
            .map(fmt_f64)
            .unwrap_or_default();
        let k = self.k.map(|k| k.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.encoder,
            self.classifier,
            threshold,
            k,
            fmt_f64(self.train_accuracy),
            fmt_f64(self.test_accuracy),
            fmt_f64(self.train_auc),
            fmt_f64(self.test_auc),
            fmt_f64(self.mse_accuracy),
            fmt_f64(self.mse_auc),
            fmt_f64(self.harmonic_accuracy),
            fmt_f64(self.harmonic_auc)
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<EvalRecord> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(Error::Serialization(format!(
                "expected 12 fields in record row, found {}",
                fields.len()
            )));
        }
        let real = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Serialization(format!("bad {what} value '{s}'")))
        };
        Ok(EvalRecord {
            encoder: fields[0].to_string(),
            classifier: fields[1].to_string(),
            threshold_percent: if fields[2].is_empty() {
                None
            } else {
                Some(real(fields[2], "threshold")?)
            },
            k: if fields[3].is_empty() {
                None
            } else {
                Some(fields[3].parse().map_err(|_| {
                    Error::Serialization(format!("bad k value '{}'", fields[3]))
                })?)
            },
            train_accuracy: real(fields[4], "train_accuracy")?,
            test_accuracy: real(fields[5], "test_accuracy")?,
            train_auc: real(fields[6], "train_auc")?,
            test_auc: real(fields[7], "test_auc")?,
            mse_accuracy: real(fields[8], "mse_accuracy")?,
            mse_auc: real(fields[9], "mse_auc")?,
            harmonic_accuracy: real(fields[10], "harmonic_accuracy")?,
            harmonic_auc: real(fields[11], "harmonic_auc")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(y: &[u8]) -> Vec<ClassLabel> {
        y.iter()
            .map(|&v| {
                if v == 1 {
                    ClassLabel::Attack
                } else {
                    ClassLabel::Normal
                }
            })
            .collect()
    }

    /// O(n^2) pairwise definition used as the oracle.
    fn auc_pairwise(scores: &[f64], truth: &[ClassLabel]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, si) in scores.iter().enumerate() {
            if truth[i] != ClassLabel::Attack {
                continue;
            }
            for (j, sj) in scores.iter().enumerate() {
                if truth[j] != ClassLabel::Normal {
                    continue;
                }
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn accuracy_basics() {
        let t = labels(&[0, 1, 0, 1]);
        assert_eq!(accuracy(&t, &t).unwrap(), 100.0);
        let half = labels(&[0, 1, 1, 0]);
        assert_eq!(accuracy(&half, &t).unwrap(), 50.0);
        assert!(matches!(
            accuracy(&t[..2], &t),
            Err(Error::LengthMismatch(2, 4))
        ));
        assert!(matches!(accuracy(&[], &[]), Err(Error::NoRecords)));
    }

    #[test]
    fn accuracy_of_flipped_predictions_complements() {
        let t = labels(&[0, 1, 1, 0, 1]);
        let p = labels(&[0, 0, 1, 1, 1]);
        let flipped: Vec<ClassLabel> = p
            .iter()
            .map(|l| match l {
                ClassLabel::Normal => ClassLabel::Attack,
                ClassLabel::Attack => ClassLabel::Normal,
            })
            .collect();
        let sum = accuracy(&p, &t).unwrap() + accuracy(&flipped, &t).unwrap();
        assert_eq!(sum, 100.0);
    }

    #[test]
    fn auc_perfect_and_tied() {
        let t = labels(&[0, 0, 1, 1]);
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &t).unwrap(), 1.0);
        assert_eq!(auc(&[0.5, 0.5, 0.5, 0.5], &t).unwrap(), 0.5);
        assert_eq!(auc(&[0.9, 0.8, 0.2, 0.1], &t).unwrap(), 0.0);
        assert!(matches!(
            auc(&[0.1, 0.2], &labels(&[1, 1])),
            Err(Error::SingleClass)
        ));
        assert!(auc(&[f64::NAN, 0.0], &labels(&[0, 1])).is_err());
    }

    #[test]
    fn auc_handles_tie_blocks_like_the_oracle() {
        let t = labels(&[0, 1, 0, 1, 1, 0, 1]);
        let s = [1.0, 1.0, 0.5, 0.5, 0.5, 2.0, 2.0];
        let fast = auc(&s, &t).unwrap();
        let slow = auc_pairwise(&s, &t);
        assert!((fast - slow).abs() <= 1e-12, "{fast} vs {slow}");
    }

    #[test]
    fn mse_hand_values() {
        assert_eq!(mse_to_ideal_accuracy(100.0, 100.0).unwrap(), 0.0);
        assert_eq!(mse_to_ideal_accuracy(90.0, 80.0).unwrap(), 250.0);
        assert_eq!(
            mse_to_ideal_accuracy(90.0, 80.0).unwrap(),
            mse_to_ideal_accuracy(80.0, 90.0).unwrap()
        );
        assert_eq!(mse_to_ideal_auc(1.0, 1.0).unwrap(), 0.0);
        assert!((mse_to_ideal_auc(0.9, 0.8).unwrap() - 0.025).abs() < 1e-15);
        assert!(matches!(
            mse_to_ideal_accuracy(101.0, 50.0),
            Err(Error::MetricOutOfRange { .. })
        ));
        assert!(matches!(
            mse_to_ideal_auc(0.5, -0.1),
            Err(Error::MetricOutOfRange { .. })
        ));
    }

    #[test]
    fn mse_ranks_balanced_pairs_better() {
        // (95, 89) beats (96.3, 79.5) despite the lower best value.
        let balanced = mse_to_ideal_accuracy(95.0, 89.0).unwrap();
        let lopsided = mse_to_ideal_accuracy(96.3, 79.5).unwrap();
        assert_eq!(balanced, 73.0);
        assert!((lopsided - 216.97).abs() < 1e-9);
        assert!(balanced < lopsided);
    }

    #[test]
    fn harmonic_hand_values() {
        assert_eq!(harmonic_avg(42.0, 42.0).unwrap(), 42.0);
        let h = harmonic_avg(92.18, 89.11).unwrap();
        assert!((h - 90.6161).abs() <= 0.005, "harmonic {h}");
        assert!(matches!(
            harmonic_avg(0.0, 1.0),
            Err(Error::NonPositiveInput(_, _))
        ));
        assert!(matches!(
            harmonic_avg(1.0, -2.0),
            Err(Error::NonPositiveInput(_, _))
        ));
    }

    #[test]
    fn record_csv_round_trip() {
        let rec = EvalRecord::from_metrics(
            "threshold_pca",
            "linear_svm",
            Some(1.87),
            Some(3),
            92.18,
            89.11,
            0.95,
            0.91,
        )
        .unwrap();
        let row = rec.to_csv_row();
        let back = EvalRecord::parse_csv_row(&row).unwrap();
        assert_eq!(rec, back);
        assert_eq!(EvalRecord::CSV_HEADER.split(',').count(), 12);

        let baseline = EvalRecord::from_metrics(
            "one_hot", "gaussian_nb", None, None, 80.0, 75.0, 0.8, 0.7,
        )
        .unwrap();
        let row = baseline.to_csv_row();
        assert!(row.contains(",,"));
        assert_eq!(EvalRecord::parse_csv_row(&row).unwrap(), baseline);
    }

    proptest! {
        /// Rank AUC equals the O(n^2) oracle, with heavy ties forced by a
        /// small score alphabet.
        #[test]
        fn auc_matches_pairwise_oracle(
            scores in prop::collection::vec(0u8..6, 2..60),
            flips in prop::collection::vec(any::<bool>(), 2..60),
        ) {
            let n = scores.len().min(flips.len());
            let s: Vec<f64> = scores[..n].iter().map(|v| *v as f64 / 3.0).collect();
            let t: Vec<ClassLabel> = flips[..n]
                .iter()
                .map(|f| if *f { ClassLabel::Attack } else { ClassLabel::Normal })
                .collect();
            let pos = t.iter().filter(|l| **l == ClassLabel::Attack).count();
            prop_assume!(pos > 0 && pos < n);
            let fast = auc(&s, &t).unwrap();
            let slow = auc_pairwise(&s, &t);
            prop_assert!((fast - slow).abs() <= 1e-12);
        }

        /// Strictly increasing transforms leave the rank AUC bit-identical.
        #[test]
        fn auc_invariant_under_monotone_transform(
            scores in prop::collection::vec(-50i32..50, 2..40),
            flips in prop::collection::vec(any::<bool>(), 2..40),
        ) {
            let n = scores.len().min(flips.len());
            let s: Vec<f64> = scores[..n].iter().map(|v| *v as f64).collect();
            let t: Vec<ClassLabel> = flips[..n]
                .iter()
                .map(|f| if *f { ClassLabel::Attack } else { ClassLabel::Normal })
                .collect();
            let pos = t.iter().filter(|l| **l == ClassLabel::Attack).count();
            prop_assume!(pos > 0 && pos < n);
            let mapped: Vec<f64> = s.iter().map(|v| (v * 0.1).exp() + 3.0).collect();
            prop_assert_eq!(auc(&s, &t).unwrap(), auc(&mapped, &t).unwrap());
        }

        /// Harmonic average always lies between its inputs.
        #[test]
        fn harmonic_between_min_and_max(e in 1e-3f64..1e3, f in 1e-3f64..1e3) {
            let h = harmonic_avg(e, f).unwrap();
            prop_assert!(h >= e.min(f) - 1e-12 && h <= e.max(f) + 1e-12);
            // AM-HM inequality.
            prop_assert!(h <= 0.5 * (e + f) + 1e-12);
        }
    }
}
