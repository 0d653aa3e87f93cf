//! Deterministic full-batch training for the two linear models.
//!
//! Logistic regression minimizes L2-regularized log-loss by gradient descent
//! with a fixed step size derived from a Lipschitz bound; the linear SVM
//! minimizes L2-regularized hinge loss by subgradient descent with a
//! `1/sqrt(t+1)` schedule, keeping the best-objective iterate. Both use
//! regularization strength `lambda = 1 / (C * n)` so C matches the usual
//! inverse-regularization convention.

use ndarray::ArrayView2;

/// L2-regularized mean log-loss and its gradient at `(w, b)`.
///
/// `z` holds +-1 targets. Returns `(loss, d_loss/d_w, d_loss/d_b)`.
pub fn logistic_loss_grad(
    w: &[f64],
    b: f64,
    x: ArrayView2<f64>,
    z: &[f64],
    lambda: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.nrows() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; w.len()];
    let mut grad_b = 0.0;
    for (row, &zi) in x.rows().into_iter().zip(z) {
        let margin = zi * (row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b);
        // ln(1 + exp(-m)) computed stably for both signs of m.
        loss += if margin > 0.0 {
            (-margin).exp().ln_1p()
        } else {
            -margin + margin.exp().ln_1p()
        };
        // d/dm ln(1+exp(-m)) = -sigmoid(-m)
        let coeff = -zi * sigmoid(-margin);
        for (g, a) in grad_w.iter_mut().zip(row) {
            *g += coeff * a;
        }
        grad_b += coeff;
    }
    loss /= n;
    grad_b /= n;
    for (g, &wi) in grad_w.iter_mut().zip(w) {
        *g = *g / n + lambda * wi;
    }
    loss += 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    (loss, grad_w, grad_b)
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Gradient descent on the logistic objective from the zero vector.
///
/// The step size is `1 / L` with `L` the trace bound
/// `(trace(X'X) + n) / (4n) + lambda` on the Hessian spectral norm, so
/// descent is monotone without a line search. Stops after `epochs` or when
/// the loss decrease falls below `tolerance`.
pub fn train_logistic(
    x: ArrayView2<f64>,
    z: &[f64],
    lambda: f64,
    epochs: usize,
    tolerance: f64,
) -> (Vec<f64>, f64) {
    let n = x.nrows() as f64;
    let trace: f64 = x.iter().map(|v| v * v).sum::<f64>() + n;
    let lipschitz = trace / (4.0 * n) + lambda;
    let step = 1.0 / lipschitz;
    let mut w = vec![0.0; x.ncols()];
    let mut b = 0.0;
    let mut prev_loss = f64::INFINITY;
    for _ in 0..epochs {
        let (loss, grad_w, grad_b) = logistic_loss_grad(&w, b, x, z, lambda);
        if (prev_loss - loss).abs() <= tolerance {
            break;
        }
        prev_loss = loss;
        for (wi, g) in w.iter_mut().zip(&grad_w) {
            *wi -= step * g;
        }
        b -= step * grad_b;
    }
    (w, b)
}

/// L2-regularized mean hinge loss at `(w, b)`.
pub fn hinge_objective(w: &[f64], b: f64, x: ArrayView2<f64>, z: &[f64], lambda: f64) -> f64 {
    let n = x.nrows() as f64;
    let mut loss = 0.0;
    for (row, &zi) in x.rows().into_iter().zip(z) {
        let margin = zi * (row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b);
        loss += (1.0 - margin).max(0.0);
    }
    loss / n + 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>()
}

/// Full-batch subgradient descent on the hinge objective from the zero
/// vector, step `1/sqrt(t+1)`; returns the iterate with the lowest objective
/// (subgradient steps are not monotone).
pub fn train_linear_svm(
    x: ArrayView2<f64>,
    z: &[f64],
    lambda: f64,
    epochs: usize,
) -> (Vec<f64>, f64) {
    let n = x.nrows() as f64;
    let d = x.ncols();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut best_w = w.clone();
    let mut best_b = b;
    let mut best_obj = hinge_objective(&w, b, x, z, lambda);
    for t in 0..epochs {
        let mut grad_w = vec![0.0; d];
        let mut grad_b = 0.0;
        for (row, &zi) in x.rows().into_iter().zip(z) {
            let margin = zi * (row.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b);
            if margin < 1.0 {
                for (g, a) in grad_w.iter_mut().zip(row) {
                    *g -= zi * a;
                }
                grad_b -= zi;
            }
        }
        let step = 1.0 / ((t + 1) as f64).sqrt();
        for (wi, g) in w.iter_mut().zip(&grad_w) {
            *wi -= step * (*g / n + lambda * *wi);
        }
        b -= step * grad_b / n;
        let obj = hinge_objective(&w, b, x, z, lambda);
        if obj < best_obj {
            best_obj = obj;
            best_w.copy_from_slice(&w);
            best_b = b;
        }
    }
    (best_w, best_b)
}
