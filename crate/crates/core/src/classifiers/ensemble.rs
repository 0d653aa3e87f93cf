//! AdaBoost (SAMME weighting over trees) and the bootstrap random forest.

use ndarray::ArrayView2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{GrowParams, Tree};

/// Weighted-error floor that stands in for a perfect weak learner.
const ERR_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BoostModel {
    /// Trees with their SAMME vote weights alpha.
    pub(crate) rounds: Vec<(Tree, f64)>,
}

/// Train discrete-SAMME AdaBoost: `n_rounds` trees of depth `max_depth`, all
/// features considered at every split, sample weights re-normalized each
/// round. Stops early on a perfect round or when no weak learner beats 0.5
/// weighted error.
pub(crate) fn train_adaboost(
    x: ArrayView2<f64>,
    y: &[f64],
    n_rounds: usize,
    max_depth: usize,
    seed: u64,
) -> BoostModel {
    let n = y.len();
    let rows: Vec<usize> = (0..n).collect();
    let params = GrowParams {
        max_depth,
        max_features: x.ncols(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![1.0 / n as f64; n];
    let mut rounds = Vec::with_capacity(n_rounds);
    for _ in 0..n_rounds {
        let tree = Tree::grow(x, y, &w, &rows, &params, &mut rng);
        let mut err = 0.0;
        let mut wrong = vec![false; n];
        for r in 0..n {
            let pred = f64::from(tree.predict_row(x, r) >= 0.5);
            if pred != y[r] {
                wrong[r] = true;
                err += w[r];
            }
        }
        if err >= 0.5 {
            // Weak learner no better than chance under the current weights:
            // keep earlier rounds (or a single vote if this was the first).
            if rounds.is_empty() {
                rounds.push((tree, 1.0));
            }
            break;
        }
        let err_c = err.max(ERR_FLOOR);
        let alpha = ((1.0 - err_c) / err_c).ln();
        rounds.push((tree, alpha));
        if err <= 0.0 {
            break;
        }
        let mut total = 0.0;
        for r in 0..n {
            if wrong[r] {
                w[r] *= alpha.exp();
            }
            total += w[r];
        }
        for wi in &mut w {
            *wi /= total;
        }
    }
    BoostModel { rounds }
}

impl BoostModel {
    /// Signed vote sum: positive means attack. Each tree votes +-1.
    pub(crate) fn score_row(&self, x: ArrayView2<f64>, row: usize) -> f64 {
        self.rounds
            .iter()
            .map(|(tree, alpha)| {
                let vote = if tree.predict_row(x, row) >= 0.5 { 1.0 } else { -1.0 };
                alpha * vote
            })
            .sum()
    }

    /// 0/1 training error of the first `1..=rounds` partial ensembles.
    pub(crate) fn staged_errors(&self, x: ArrayView2<f64>, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        let mut scores = vec![0.0; n];
        let mut out = Vec::with_capacity(self.rounds.len());
        for (tree, alpha) in &self.rounds {
            let mut wrong = 0usize;
            for (r, s) in scores.iter_mut().enumerate() {
                let vote = if tree.predict_row(x, r) >= 0.5 { 1.0 } else { -1.0 };
                *s += alpha * vote;
                let pred = f64::from(*s >= 0.0);
                if pred != y[r] {
                    wrong += 1;
                }
            }
            out.push(wrong as f64 / n as f64);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ForestModel {
    pub(crate) trees: Vec<Tree>,
}

/// Train a random forest: tree `i` uses RNG seed `seed + i`, an optional
/// bootstrap resample drawn from that RNG, and per-split feature
/// subsampling capped at `max_features`.
pub(crate) fn train_forest(
    x: ArrayView2<f64>,
    y: &[f64],
    n_trees: usize,
    max_depth: usize,
    max_features: usize,
    bootstrap: bool,
    seed: u64,
) -> ForestModel {
    let n = y.len();
    let w = vec![1.0; n];
    let params = GrowParams {
        max_depth,
        max_features,
    };
    let trees = (0..n_trees)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let rows: Vec<usize> = if bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            Tree::grow(x, y, &w, &rows, &params, &mut rng)
        })
        .collect();
    ForestModel { trees }
}

impl ForestModel {
    /// Mean attack probability across trees.
    pub(crate) fn score_row(&self, x: ArrayView2<f64>, row: usize) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_row(x, row)).sum();
        sum / self.trees.len() as f64
    }
}
