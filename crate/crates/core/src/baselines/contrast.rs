//! Contrast matrices for categorical design coding.
//!
//! Each builder returns a `c x (c-1)` matrix as rows: row `i` is the encoded
//! block for the level with ordinal index `i` (first-appearance order). All
//! four variants produce linearly independent columns; the polynomial variant
//! additionally produces orthonormal columns.

/// Sum (deviation) coding: level `i < c-1` maps to the `i`-th unit vector,
/// the last level to all `-1`.
pub fn sum_matrix(c: usize) -> Vec<Vec<f64>> {
    let width = c.saturating_sub(1);
    (0..c)
        .map(|i| {
            (0..width)
                .map(|j| {
                    if i == c - 1 {
                        -1.0
                    } else if i == j {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Helmert coding: column `j` contrasts level `j+1` against the mean of all
/// earlier levels (entries -1 for levels 0..=j, `j+1` for level j+1, else 0).
pub fn helmert_matrix(c: usize) -> Vec<Vec<f64>> {
    let width = c.saturating_sub(1);
    (0..c)
        .map(|i| {
            (0..width)
                .map(|j| {
                    if i <= j {
                        -1.0
                    } else if i == j + 1 {
                        (j + 1) as f64
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Backward-difference coding: column `j` contrasts level `j+1` with level
/// `j`; entries are `-(c-1-j)/c` for levels up to `j` and `(j+1)/c` beyond.
pub fn backward_difference_matrix(c: usize) -> Vec<Vec<f64>> {
    let width = c.saturating_sub(1);
    let cf = c as f64;
    (0..c)
        .map(|i| {
            (0..width)
                .map(|j| {
                    if i <= j {
                        ((j + 1) as f64 - cf) / cf
                    } else {
                        (j + 1) as f64 / cf
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal polynomial coding over equally spaced points `0..c`.
///
/// Columns are degree 1..c-1 orthogonal polynomials built by the Stieltjes
/// three-term recurrence with two re-orthogonalization passes, which keeps
/// the basis orthonormal to ~1e-14 even at c = 70 where a naive Vandermonde
/// Gram-Schmidt loses all precision.
pub fn polynomial_matrix(c: usize) -> Vec<Vec<f64>> {
    if c <= 1 {
        return vec![vec![]; c];
    }
    let x: Vec<f64> = (0..c).map(|i| i as f64).collect();
    let norm = (c as f64).sqrt();
    let mut basis: Vec<Vec<f64>> = vec![x.iter().map(|_| 1.0 / norm).collect()];
    for deg in 1..c {
        let prev = &basis[deg - 1];
        let mut v: Vec<f64> = x.iter().zip(prev).map(|(xi, pi)| xi * pi).collect();
        for _pass in 0..2 {
            for q in &basis {
                let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let n: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for vi in &mut v {
            *vi /= n;
        }
        basis.push(v);
    }
    // Transpose, dropping the constant column.
    (0..c)
        .map(|i| (1..c).map(|deg| basis[deg][i]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(m: &[Vec<f64>], j: usize) -> Vec<f64> {
        m.iter().map(|row| row[j]).collect()
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Residual norm of each column after projecting out the previous ones;
    /// all positive means the columns are linearly independent.
    fn min_residual(m: &[Vec<f64>]) -> f64 {
        let width = m[0].len();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut min_norm = f64::INFINITY;
        for j in 0..width {
            let mut v = column(m, j);
            for q in &basis {
                let d = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= d * qi;
                }
            }
            let n = dot(&v, &v).sqrt();
            min_norm = min_norm.min(n);
            if n > 0.0 {
                for vi in &mut v {
                    *vi /= n;
                }
                basis.push(v);
            }
        }
        min_norm
    }

    #[test]
    fn sum_matrix_small_case() {
        assert_eq!(
            sum_matrix(3),
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]
        );
    }

    #[test]
    fn helmert_matrix_small_case() {
        assert_eq!(
            helmert_matrix(3),
            vec![vec![-1.0, -1.0], vec![1.0, -1.0], vec![0.0, 2.0]]
        );
    }

    #[test]
    fn backward_difference_matrix_small_case() {
        let m = backward_difference_matrix(4);
        let expected = [
            [-0.75, -0.5, -0.25],
            [0.25, -0.5, -0.25],
            [0.25, 0.5, -0.25],
            [0.25, 0.5, 0.75],
        ];
        for (row, exp) in m.iter().zip(&expected) {
            for (a, b) in row.iter().zip(exp) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn all_variants_have_independent_columns() {
        for c in [2usize, 3, 11, 70] {
            for (name, m) in [
                ("sum", sum_matrix(c)),
                ("helmert", helmert_matrix(c)),
                ("backward_difference", backward_difference_matrix(c)),
                ("polynomial", polynomial_matrix(c)),
            ] {
                assert_eq!(m.len(), c);
                assert_eq!(m[0].len(), c - 1);
                let r = min_residual(&m);
                assert!(r > 1e-8, "{name} c={c}: dependent columns (residual {r})");
            }
        }
    }

    #[test]
    fn polynomial_columns_are_orthonormal() {
        for c in [2usize, 5, 11, 70] {
            let m = polynomial_matrix(c);
            for i in 0..c - 1 {
                for j in i..c - 1 {
                    let d = dot(&column(&m, i), &column(&m, j));
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (d - want).abs() <= 1e-10,
                        "c={c} cols ({i},{j}): dot {d}"
                    );
                }
                // Orthogonal to the constant (intercept) direction.
                let s: f64 = column(&m, i).iter().sum();
                assert!(s.abs() <= 1e-10, "c={c} col {i} sum {s}");
            }
        }
    }

    #[test]
    fn polynomial_linear_column_is_centered_ramp() {
        let m = polynomial_matrix(5);
        let lin = column(&m, 0);
        // Proportional to x - mean(x) = [-2, -1, 0, 1, 2] normalized.
        let scale = 10f64.sqrt();
        for (i, v) in lin.iter().enumerate() {
            let want = (i as f64 - 2.0) / scale;
            assert!((v - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn degenerate_cardinalities() {
        assert_eq!(sum_matrix(1), vec![Vec::<f64>::new()]);
        assert_eq!(polynomial_matrix(1), vec![Vec::<f64>::new()]);
        assert_eq!(sum_matrix(2), vec![vec![1.0], vec![-1.0]]);
    }
}
