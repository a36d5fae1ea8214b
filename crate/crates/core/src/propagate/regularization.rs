//! Quadratic objectives whose minimizers are the target- and
//! source-normalized propagation fixed points.
//!
//! Smoothness is summed once per undirected edge. With that convention the
//! minimizer of `q1` is `(1 - alpha)(I - alpha D^-1 A)^-1 Y` and the
//! minimizer of `q2` is `(1 - alpha)(I - alpha A D^-1)^-1 Y`, both with
//! `alpha = 1 / (1 + mu)`.

use crate::graph::Graph;
use crate::scores::ScoreMatrix;

fn sq_dist(a: &[f64], b: &[f64], sa: f64, sb: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (sa * x - sb * y).powi(2)).sum()
}

/// `1/2 (sum_{i~j} |F_i - F_j|^2 + mu sum_i d_i |F_i - Y_i|^2)`
pub fn q1_objective(g: &Graph, f: &ScoreMatrix, y: &ScoreMatrix, mu: f64) -> f64 {
    let smooth: f64 = g.edges().map(|(u, v)| sq_dist(f.row(u), f.row(v), 1.0, 1.0)).sum();
    let fit: f64 = (0..g.node_count())
        .map(|i| g.degree(i) as f64 * sq_dist(f.row(i), y.row(i), 1.0, 1.0))
        .sum();
    0.5 * (smooth + mu * fit)
}

/// `(D - A) F + mu D (F - Y)`
pub fn q1_gradient(g: &Graph, f: &ScoreMatrix, y: &ScoreMatrix, mu: f64) -> ScoreMatrix {
    let mut grad = ScoreMatrix::zeros(f.rows(), f.cols());
    for i in 0..g.node_count() {
        let d = g.degree(i) as f64;
        let out = grad.row_mut(i);
        for (c, o) in out.iter_mut().enumerate() {
            *o = d * f.get(i, c) + mu * d * (f.get(i, c) - y.get(i, c));
        }
        for &j in g.neighbors(i) {
            for (o, v) in out.iter_mut().zip(f.row(j)) {
                *o -= v;
            }
        }
    }
    grad
}

/// `1/2 (sum_{i~j} |F_i/d_i - F_j/d_j|^2 + mu sum_i |F_i - Y_i|^2 / d_i)`
///
/// Requires every degree to be positive.
pub fn q2_objective(g: &Graph, f: &ScoreMatrix, y: &ScoreMatrix, mu: f64) -> f64 {
    let inv = g.inverse_degrees();
    let smooth: f64 = g
        .edges()
        .map(|(u, v)| sq_dist(f.row(u), f.row(v), inv[u], inv[v]))
        .sum();
    let fit: f64 = (0..g.node_count())
        .map(|i| inv[i] * sq_dist(f.row(i), y.row(i), 1.0, 1.0))
        .sum();
    0.5 * (smooth + mu * fit)
}

/// `D^-1 (D - A) D^-1 F + mu D^-1 (F - Y)`
pub fn q2_gradient(g: &Graph, f: &ScoreMatrix, y: &ScoreMatrix, mu: f64) -> ScoreMatrix {
    let inv = g.inverse_degrees();
    let mut grad = ScoreMatrix::zeros(f.rows(), f.cols());
    for i in 0..g.node_count() {
        let out = grad.row_mut(i);
        for (c, o) in out.iter_mut().enumerate() {
            *o = f.get(i, c) + mu * (f.get(i, c) - y.get(i, c));
        }
        for &j in g.neighbors(i) {
            for (o, v) in out.iter_mut().zip(f.row(j)) {
                *o -= inv[j] * v;
            }
        }
        out.iter_mut().for_each(|o| *o *= inv[i]);
    }
    grad
}
