//! Gaussian naive Bayes with a relative variance floor.

use ndarray::ArrayView2;

/// Class variances below `VAR_FLOOR_RATIO * max feature variance` are clamped
/// to it, so constant-within-class features cannot produce infinite
/// likelihoods.
const VAR_FLOOR_RATIO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct GnbModel {
    pub(crate) log_prior_normal: f64,
    pub(crate) log_prior_attack: f64,
    pub(crate) mean_normal: Vec<f64>,
    pub(crate) mean_attack: Vec<f64>,
    pub(crate) var_normal: Vec<f64>,
    pub(crate) var_attack: Vec<f64>,
}

fn class_moments(x: ArrayView2<f64>, rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let d = x.ncols();
    let n = rows.len() as f64;
    let mut mean = vec![0.0; d];
    for &r in rows {
        for j in 0..d {
            mean[j] += x[(r, j)];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = vec![0.0; d];
    for &r in rows {
        for j in 0..d {
            let dev = x[(r, j)] - mean[j];
            var[j] += dev * dev;
        }
    }
    for v in &mut var {
        *v /= n;
    }
    (mean, var)
}

pub(crate) fn train_gnb(x: ArrayView2<f64>, y: &[f64]) -> GnbModel {
    let normal_rows: Vec<usize> = (0..y.len()).filter(|&r| y[r] == 0.0).collect();
    let attack_rows: Vec<usize> = (0..y.len()).filter(|&r| y[r] == 1.0).collect();
    let (mean_normal, mut var_normal) = class_moments(x, &normal_rows);
    let (mean_attack, mut var_attack) = class_moments(x, &attack_rows);

    // Overall per-feature variance sets the scale of the floor.
    let all_rows: Vec<usize> = (0..y.len()).collect();
    let (_, var_all) = class_moments(x, &all_rows);
    let max_var = var_all.iter().cloned().fold(0.0f64, f64::max);
    let floor = (VAR_FLOOR_RATIO * max_var).max(f64::MIN_POSITIVE);
    for v in var_normal.iter_mut().chain(var_attack.iter_mut()) {
        if *v < floor {
            *v = floor;
        }
    }

    let n = y.len() as f64;
    GnbModel {
        log_prior_normal: (normal_rows.len() as f64 / n).ln(),
        log_prior_attack: (attack_rows.len() as f64 / n).ln(),
        mean_normal,
        mean_attack,
        var_normal,
        var_attack,
    }
}

impl GnbModel {
    /// Log-posterior-odds of attack vs normal for one row: positive means
    /// attack is the more likely class.
    pub(crate) fn score_row(&self, x: ArrayView2<f64>, row: usize) -> f64 {
        let mut score = self.log_prior_attack - self.log_prior_normal;
        for j in 0..self.mean_normal.len() {
            let v = x[(row, j)];
            score += log_gauss(v, self.mean_attack[j], self.var_attack[j])
                - log_gauss(v, self.mean_normal[j], self.var_normal[j]);
        }
        score
    }
}

fn log_gauss(v: f64, mean: f64, var: f64) -> f64 {
    let dev = v - mean;
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + dev * dev / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn symmetric_means_put_boundary_at_zero() {
        let x = array![[-1.2], [-1.0], [-0.8], [0.8], [1.0], [1.2]];
        let y = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let model = train_gnb(x.view(), &y);
        // Equal priors and mirrored class moments: score(v) = -score(-v).
        let probe = array![[0.0], [0.5], [-0.5]];
        let s0 = model.score_row(probe.view(), 0);
        assert!(s0.abs() < 1e-9, "boundary score {s0}");
        let sp = model.score_row(probe.view(), 1);
        let sm = model.score_row(probe.view(), 2);
        assert!((sp + sm).abs() < 1e-9);
        assert!(sp > 0.0, "positive side scores attack-like");
    }

    #[test]
    fn scores_match_hand_rolled_bayes_oracle() {
        let x = array![[0.0, 2.0], [1.0, 0.0], [2.0, 1.0]];
        let y = [0.0, 1.0, 1.0];
        let model = train_gnb(x.view(), &y);

        // Oracle: direct Bayes-rule arithmetic with the same variance floor.
        let mean_n = [0.0, 2.0];
        let mean_a = [1.5, 0.5];
        // Normal class has one row: floored variance.
        let var_all_max: f64 = [
            ((0.0f64 - 1.0).powi(2) + (1.0f64 - 1.0).powi(2) + (2.0f64 - 1.0).powi(2)) / 3.0,
            ((2.0f64 - 1.0).powi(2) + (0.0f64 - 1.0).powi(2) + (1.0f64 - 1.0).powi(2)) / 3.0,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let floor = 1e-9 * var_all_max;
        let var_n = [floor, floor];
        let var_a = [0.25f64, 0.25];
        for row in 0..3 {
            let mut want = (2.0f64 / 3.0).ln() - (1.0f64 / 3.0).ln();
            for j in 0..2 {
                want += log_gauss(x[(row, j)], mean_a[j], var_a[j])
                    - log_gauss(x[(row, j)], mean_n[j], var_n[j]);
            }
            let got = model.score_row(x.view(), row);
            let rel = (got - want).abs() / want.abs().max(1.0);
            assert!(rel < 1e-12, "row {row}: {got} vs {want}");
        }
    }

    #[test]
    fn constant_feature_does_not_blow_up() {
        let x = array![[1.0, 0.0], [1.0, 1.0], [1.0, 0.5], [1.0, 1.5]];
        let y = [0.0, 0.0, 1.0, 1.0];
        let model = train_gnb(x.view(), &y);
        for row in 0..4 {
            assert!(model.score_row(x.view(), row).is_finite());
        }
    }
}
