//! Principal component analysis over small feature matrices.
//!
//! The eigendecomposition is a cyclic Jacobi sweep over the sample covariance
//! matrix. Input widths here are tiny (twice the categorical variable count),
//! so Jacobi is both fast and bit-deterministic: fixed rotation order, fixed
//! eigenvalue sort, fixed sign convention.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative eigenvalue cutoff below which a component counts as degenerate.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// Fitted PCA basis. `components` holds one orthonormal row per usable
/// (non-degenerate) direction, ordered by non-increasing explained variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub means: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.means.len()
    }

    /// Number of usable components.
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Center by the fitted means and project onto the first `k` components.
    pub fn project(&self, x: ArrayView2<f64>, k: usize) -> Result<Array2<f64>> {
        if x.ncols() != self.input_dim() {
            return Err(Error::WidthMismatch {
                expected: self.input_dim(),
                found: x.ncols(),
            });
        }
        if k == 0 || k > self.n_components() {
            return Err(Error::InvalidParam(format!(
                "component count {k} outside [1, {}]",
                self.n_components()
            )));
        }
        let d = self.input_dim();
        let mut basis = Array2::zeros((d, k));
        for (j, comp) in self.components.iter().take(k).enumerate() {
            for i in 0..d {
                basis[(i, j)] = comp[i];
            }
        }
        let means = Array1::from(self.means.clone());
        let centered = &x - &means.broadcast((x.nrows(), d)).unwrap();
        Ok(centered.dot(&basis))
    }

    /// Map `k`-dimensional scores back to centered input space.
    pub fn inverse_project(&self, scores: ArrayView2<f64>) -> Result<Array2<f64>> {
        let k = scores.ncols();
        if k > self.n_components() {
            return Err(Error::WidthMismatch {
                expected: self.n_components(),
                found: k,
            });
        }
        let d = self.input_dim();
        let mut basis = Array2::zeros((k, d));
        for (j, comp) in self.components.iter().take(k).enumerate() {
            for i in 0..d {
                basis[(j, i)] = comp[i];
            }
        }
        Ok(scores.dot(&basis))
    }
}

/// Fit PCA on `x`: column means, covariance eigendecomposition, degenerate
/// drop, deterministic ordering and signs.
// Index loops keep the symmetric-matrix arithmetic readable.
#[allow(clippy::needless_range_loop)]
pub fn fit_pca(x: ArrayView2<f64>) -> Result<PcaModel> {
    let n = x.nrows();
    let d = x.ncols();
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    let means: Vec<f64> = (0..d).map(|j| x.column(j).sum() / n as f64).collect();

    // Sample covariance (n-1 denominator) of the centered data.
    let mut cov = vec![vec![0.0f64; d]; d];
    for row in x.rows() {
        for i in 0..d {
            let ci = row[i] - means[i];
            for j in i..d {
                cov[i][j] += ci * (row[j] - means[j]);
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
    }

    let (mut eigvals, mut eigvecs) = jacobi_eigen(&cov);

    // Non-increasing eigenvalue order; index tiebreak keeps the sort stable.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eigvals[b]
            .partial_cmp(&eigvals[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    eigvals = order.iter().map(|&i| eigvals[i]).collect();
    eigvecs = order.iter().map(|&i| eigvecs[i].clone()).collect();

    let max_ev = eigvals.first().copied().unwrap_or(0.0);
    if max_ev <= 0.0 {
        return Err(Error::NoUsableComponents);
    }
    let cutoff = DEGENERATE_EPS * max_ev;
    let mut components = Vec::new();
    let mut explained = Vec::new();
    for (ev, vec) in eigvals.into_iter().zip(eigvecs) {
        if ev < cutoff {
            break;
        }
        components.push(fix_sign(vec));
        explained.push(ev);
    }
    if components.is_empty() {
        return Err(Error::NoUsableComponents);
    }
    Ok(PcaModel {
        means,
        components,
        explained_variance: explained,
    })
}

/// Flip the vector so its largest-magnitude loading is positive. Ties take
/// the first index with the maximal magnitude.
fn fix_sign(mut v: Vec<f64>) -> Vec<f64> {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    v
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvectors-as-rows), unsorted.
#[allow(clippy::needless_range_loop)]
fn jacobi_eigen(m: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut v = vec![vec![0.0f64; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let frob: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if frob == 0.0 {
        return ((0..d).map(|i| a[i][i]).collect(), v);
    }
    let tol = 1e-14 * frob;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..d {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let vpk = v[p][k];
                    let vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    ((0..d).map(|i| a[i][i]).collect(), v)
}
