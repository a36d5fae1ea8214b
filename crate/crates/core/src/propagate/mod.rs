//! Label propagation kernels.
//!
//! Every kernel is a resolvent `(I - alpha T)^-1 Y` of a degree-normalized
//! adjacency operator `T`:
//!
//! | [`Kernel`]              | operator            |
//! |-------------------------|---------------------|
//! | `RandomWalk`            | `D^-1 A`            |
//! | `SourceNormalized`      | `A D^-1`            |
//! | `NormalizedLaplacian`   | `D^-1/2 A D^-1/2`   |
//!
//! All three operators have spectral radius at most 1, so for `0 < alpha < 1`
//! the resolvent equals the power series `sum_k alpha^k T^k Y`. The default
//! [`Solver`] truncates that series; [`Solver::Direct`] factors the dense
//! system and is meant for small graphs and cross-checks.
//!
//! The weighted inverse Laplacian scorer in [`wil`] mixes the first two
//! kernels.

mod regularization;
mod wil;

pub use regularization::{q1_gradient, q1_objective, q2_gradient, q2_objective};
pub use wil::{
    argmax_class, predict, rho_grid, tune_rho, wil_scores, Prediction, RhoSelection, RhoTuning,
    WilComponents,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scores::ScoreMatrix;

/// Largest graph [`Solver::Direct`] will densify.
pub const DIRECT_SOLVER_MAX_NODES: usize = 5000;

/// Default decay, `e^-0.25`.
pub fn default_alpha() -> f64 {
    (-0.25f64).exp()
}

/// Number of series terms after which `alpha^m` drops below `tolerance`:
/// `ceil(ln(tolerance) / ln(alpha))`.
pub fn series_terms_for(alpha: f64, tolerance: f64) -> usize {
    (tolerance.ln() / alpha.ln()).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    /// `D^-1 A`: a node averages its neighbors (normalized at the target).
    RandomWalk,
    /// `A D^-1`: a node splits its mass among its neighbors (normalized at
    /// the source).
    SourceNormalized,
    /// `D^-1/2 A D^-1/2`.
    NormalizedLaplacian,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [
        Kernel::RandomWalk,
        Kernel::NormalizedLaplacian,
        Kernel::SourceNormalized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::RandomWalk => "random-walk",
            Kernel::SourceNormalized => "source-normalized",
            Kernel::NormalizedLaplacian => "normalized-laplacian",
        }
    }

    pub fn from_name(s: &str) -> Option<Kernel> {
        Kernel::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Dense LU factorization of `I - alpha T`.
    Direct,
    /// `sum_{k=0}^{terms} alpha^k T^k Y`.
    Series { terms: usize },
}

impl Solver {
    /// Series truncated where `alpha^m < 1e-6` (56 terms at the default
    /// alpha).
    pub fn default_for(alpha: f64) -> Solver {
        Solver::Series {
            terms: series_terms_for(alpha, 1e-6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub alpha: f64,
    /// Weight on the random-walk kernel in the WIL mixture.
    pub rho: f64,
    pub solver: Solver,
}

impl PropagationConfig {
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        validate_alpha(alpha)?;
        let cfg = PropagationConfig {
            alpha,
            rho,
            solver: Solver::default_for(alpha),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Parameter(format!("rho = {} outside [0, 1]", self.rho)));
        }
        Ok(())
    }

    /// Regularization weight matching `alpha = 1 / (1 + mu)`.
    pub fn mu(&self) -> f64 {
        1.0 / self.alpha - 1.0
    }
}

impl Default for PropagationConfig {
    fn default() -> Self {
        let alpha = default_alpha();
        PropagationConfig {
            alpha,
            rho: 0.5,
            solver: Solver::default_for(alpha),
        }
    }
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1)")))
    }
}

/// A kernel bound to a graph with its degree weights precomputed.
pub(crate) struct Operator<'g> {
    graph: &'g Graph,
    kernel: Kernel,
    weights: Vec<f64>,
}

impl<'g> Operator<'g> {
    pub(crate) fn new(graph: &'g Graph, kernel: Kernel) -> Self {
        let inv = graph.inverse_degrees();
        let weights = match kernel {
            Kernel::NormalizedLaplacian => inv.iter().map(|v| v.sqrt()).collect(),
            _ => inv,
        };
        Operator {
            graph,
            kernel,
            weights,
        }
    }

    pub(crate) fn apply_into(&self, x: &ScoreMatrix, out: &mut ScoreMatrix) {
        match self.kernel {
            Kernel::RandomWalk => self.graph.apply_row_normalized_into(&self.weights, x, out),
            Kernel::SourceNormalized => self.graph.apply_col_normalized_into(&self.weights, x, out),
            Kernel::NormalizedLaplacian => {
                self.graph.apply_sym_normalized_into(&self.weights, x, out)
            }
        }
    }

    /// Dense `I - alpha T`.
    fn dense_system(&self, alpha: f64) -> DMatrix<f64> {
        let n = self.graph.node_count();
        let mut m = DMatrix::<f64>::identity(n, n);
        for i in 0..n {
            for &j in self.graph.neighbors(i) {
                let t = match self.kernel {
                    Kernel::RandomWalk => self.weights[i],
                    Kernel::SourceNormalized => self.weights[j],
                    Kernel::NormalizedLaplacian => self.weights[i] * self.weights[j],
                };
                m[(i, j)] -= alpha * t;
            }
        }
        m
    }

    pub(crate) fn series(&self, alpha: f64, y: &ScoreMatrix, terms: usize) -> ScoreMatrix {
        let mut total = y.clone();
        let mut term = y.clone();
        let mut next = ScoreMatrix::zeros(y.rows(), y.cols());
        for _ in 0..terms {
            self.apply_into(&term, &mut next);
            next.scale(alpha);
            std::mem::swap(&mut term, &mut next);
            total.add_scaled(1.0, &term);
        }
        total
    }

    pub(crate) fn direct(&self, alpha: f64, y: &ScoreMatrix) -> Result<ScoreMatrix> {
        let n = self.graph.node_count();
        if n > DIRECT_SOLVER_MAX_NODES {
            return Err(Error::Parameter(format!(
                "direct solver limited to {DIRECT_SOLVER_MAX_NODES} nodes (graph has {n}); use the series solver"
            )));
        }
        let lu = self.dense_system(alpha).lu();
        let rhs = DMatrix::from_row_slice(n, y.cols(), y.as_slice());
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("I - alpha T is not invertible".into()))?;
        let mut out = ScoreMatrix::zeros(n, y.cols());
        for i in 0..n {
            for c in 0..y.cols() {
                out.set(i, c, sol[(i, c)]);
            }
        }
        zero_unreached_components(self.graph, y, &mut out);
        Ok(out)
    }

    pub(crate) fn solve(&self, alpha: f64, y: &ScoreMatrix, solver: Solver) -> Result<ScoreMatrix> {
        validate_alpha(alpha)?;
        assert_eq!(y.rows(), self.graph.node_count(), "label matrix has wrong row count");
        match solver {
            Solver::Series { terms } => Ok(self.series(alpha, y, terms)),
            Solver::Direct => self.direct(alpha, y),
        }
    }
}

/// Rows in components where `y` is identically zero are exactly zero in the
/// resolvent; the dense factorization only gets them to rounding error.
fn zero_unreached_components(g: &Graph, y: &ScoreMatrix, out: &mut ScoreMatrix) {
    let comp = g.components();
    let count = comp.iter().max().map_or(0, |m| m + 1);
    let mut seeded = vec![false; count];
    for i in 0..g.node_count() {
        if y.row(i).iter().any(|&v| v != 0.0) {
            seeded[comp[i]] = true;
        }
    }
    for i in 0..g.node_count() {
        if !seeded[comp[i]] {
            out.row_mut(i).fill(0.0);
        }
    }
}

/// `(I - alpha T)^-1 Y` for the chosen kernel.
///
/// For `RandomWalk` this is `W Y` with `W = (I - alpha D^-1 A)^-1`; for
/// `SourceNormalized` it is `W' Y`, since `A` is symmetric.
pub fn solve_kernel(
    g: &Graph,
    y: &ScoreMatrix,
    alpha: f64,
    kernel: Kernel,
    solver: Solver,
) -> Result<ScoreMatrix> {
    Operator::new(g, kernel).solve(alpha, y, solver)
}

pub fn normalized_laplacian_scores(
    g: &Graph,
    y: &ScoreMatrix,
    alpha: f64,
    solver: Solver,
) -> Result<ScoreMatrix> {
    solve_kernel(g, y, alpha, Kernel::NormalizedLaplacian, solver)
}

/// Diagonal entries `W_ii` of the random-walk resolvent for the given nodes.
///
/// `W` and `W'` share their diagonal, so these are also the diagonal of any
/// mixture `rho W + (1 - rho) W'`.
pub fn self_weights(g: &Graph, nodes: &[usize], alpha: f64, solver: Solver) -> Result<Vec<f64>> {
    use rayon::prelude::*;

    validate_alpha(alpha)?;
    let n = g.node_count();
    let op = Operator::new(g, Kernel::RandomWalk);
    let unit_block = |chunk: &[usize]| {
        let mut e = ScoreMatrix::zeros(n, chunk.len());
        for (c, &i) in chunk.iter().enumerate() {
            e.set(i, c, 1.0);
        }
        e
    };
    match solver {
        Solver::Series { terms } => {
            const CHUNK: usize = 32;
            let parts: Vec<Vec<f64>> = nodes
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let w = op.series(alpha, &unit_block(chunk), terms);
                    chunk.iter().enumerate().map(|(c, &i)| w.get(i, c)).collect()
                })
                .collect();
            Ok(parts.concat())
        }
        Solver::Direct => {
            let w = op.direct(alpha, &unit_block(nodes))?;
            Ok(nodes.iter().enumerate().map(|(c, &i)| w.get(i, c)).collect())
        }
    }
}

/// Result of [`iterate_propagation`].
#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub scores: ScoreMatrix,
    pub iterations: usize,
    /// Max-entry change in the final step.
    pub last_change: f64,
}

/// Fixed-point iteration `F <- alpha T F + (1 - alpha) Y`, starting from `Y`,
/// until the largest entry changes by less than `tol`.
///
/// The limit is `(1 - alpha) (I - alpha T)^-1 Y`.
pub fn iterate_propagation(
    g: &Graph,
    y: &ScoreMatrix,
    alpha: f64,
    kernel: Kernel,
    tol: f64,
    max_iter: usize,
) -> Result<IterationOutcome> {
    validate_alpha(alpha)?;
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
    }
    let op = Operator::new(g, kernel);
    let mut f = y.clone();
    let mut next = ScoreMatrix::zeros(y.rows(), y.cols());
    let mut change = f64::INFINITY;
    for it in 1..=max_iter {
        op.apply_into(&f, &mut next);
        next.scale(alpha);
        next.add_scaled(1.0 - alpha, y);
        change = next.max_abs_diff(&f);
        std::mem::swap(&mut f, &mut next);
        if change < tol {
            return Ok(IterationOutcome {
                scores: f,
                iterations: it,
                last_change: change,
            });
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual: change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_series_length() {
        assert_eq!(series_terms_for(default_alpha(), 1e-6), 56);
        assert_eq!(Solver::default_for(default_alpha()), Solver::Series { terms: 56 });
    }

    #[test]
    fn config_domain() {
        assert!(PropagationConfig::new(0.9999, 0.5).is_ok());
        assert!(matches!(PropagationConfig::new(1.0, 0.5), Err(Error::Parameter(_))));
        assert!(matches!(PropagationConfig::new(0.5, 1.5), Err(Error::Parameter(_))));
        let cfg = PropagationConfig::new(0.5, 0.0).unwrap();
        assert!((cfg.mu() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tiny_alpha_returns_labels() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let y = ScoreMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]);
        for kernel in Kernel::ALL {
            let f = solve_kernel(&g, &y, 1e-12, kernel, Solver::Direct).unwrap();
            assert!(f.max_abs_diff(&y) < 1e-11);
            let f = solve_kernel(&g, &y, 1e-12, kernel, Solver::Series { terms: 0 }).unwrap();
            assert_eq!(f, y);
        }
    }

    #[test]
    fn symmetric_path_ties_in_the_middle() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let y = ScoreMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]);
        let f = solve_kernel(&g, &y, 0.5, Kernel::RandomWalk, Solver::Direct).unwrap();
        let mid = f.row(1);
        assert!(mid[0] > 0.0);
        assert!((mid[0] - mid[1]).abs() < 1e-15);
    }

    #[test]
    fn direct_solver_refuses_huge_graphs() {
        let g = Graph::empty(DIRECT_SOLVER_MAX_NODES + 1);
        let y = ScoreMatrix::zeros(g.node_count(), 2);
        assert!(matches!(
            solve_kernel(&g, &y, 0.5, Kernel::RandomWalk, Solver::Direct),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn iteration_reports_non_convergence() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let y = ScoreMatrix::from_rows(&[vec![1.0], vec![0.0]]);
        let err = iterate_propagation(&g, &y, 0.99, Kernel::RandomWalk, 1e-14, 3).unwrap_err();
        assert!(matches!(err, Error::Convergence { iterations: 3, .. }));
    }
}
