//! Weighted inverse Laplacian (WIL) scoring.
//!
//! With `W = (I - alpha D^-1 A)^-1` the score matrix is
//! `F = (rho W + (1 - rho) W') Y`, where the diagonal of the mixing matrix
//! is zeroed so a labeled node never votes for itself. No `(1 - alpha)`
//! prefactor is applied; predictions only depend on the row argmax.

use rand::seq::SliceRandom;

use super::{validate_alpha, Kernel, Operator, Solver};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labels::{ClassId, LabelSet};
use crate::rng::{self, Stage};
use crate::scores::ScoreMatrix;

use super::PropagationConfig;

/// The two resolvent solves behind a WIL score, kept apart so that every
/// `rho` can be scored without solving again.
#[derive(Debug, Clone)]
pub struct WilComponents {
    /// `W Y`
    pub target: ScoreMatrix,
    /// `W' Y`
    pub source: ScoreMatrix,
    /// `W_ii` for labeled nodes, 0 elsewhere.
    pub self_weight: Vec<f64>,
    labels: LabelSet,
}

impl WilComponents {
    pub fn compute(g: &Graph, labels: &LabelSet, alpha: f64, solver: Solver) -> Result<Self> {
        Self::compute_inner(g, labels, alpha, solver, true)
    }

    fn compute_inner(
        g: &Graph,
        labels: &LabelSet,
        alpha: f64,
        solver: Solver,
        with_self_weights: bool,
    ) -> Result<Self> {
        validate_alpha(alpha)?;
        if labels.len() != g.node_count() {
            return Err(Error::Input(format!(
                "{} labels for a graph with {} nodes",
                labels.len(),
                g.node_count()
            )));
        }
        let y = labels.indicator();
        let target = Operator::new(g, Kernel::RandomWalk).solve(alpha, &y, solver)?;
        let source = Operator::new(g, Kernel::SourceNormalized).solve(alpha, &y, solver)?;
        let mut self_weight = vec![0.0; g.node_count()];
        if with_self_weights {
            let known = labels.known();
            for (i, w) in known.iter().zip(super::self_weights(g, &known, alpha, solver)?) {
                self_weight[*i] = w;
            }
        }
        Ok(WilComponents {
            target,
            source,
            self_weight,
            labels: labels.clone(),
        })
    }

    /// Score row of node `i` under mixing weight `rho`.
    pub fn row(&self, i: usize, rho: f64) -> Vec<f64> {
        let mut row: Vec<f64> = self
            .target
            .row(i)
            .iter()
            .zip(self.source.row(i))
            .map(|(t, s)| rho * t + (1.0 - rho) * s)
            .collect();
        if let Some(c) = self.labels.get(i) {
            let w = self.self_weight[i];
            row[c] -= w;
            // cancellation residue when nothing else reaches node i
            if row[c].abs() <= 1e-12 * w {
                row[c] = 0.0;
            }
        }
        row
    }

    /// In-sample choice of `rho`: the grid value whose rows reproduce the
    /// most known labels. Ties go to the smallest `rho`.
    pub fn select_rho(&self, grid: &[f64]) -> Result<RhoSelection> {
        validate_grid(grid)?;
        let known = self.labels.known();
        if known.is_empty() {
            return Err(Error::Input("rho tuning needs at least one labeled node".into()));
        }
        let correct: Vec<usize> = grid
            .iter()
            .map(|&rho| {
                known
                    .iter()
                    .filter(|&&i| Some(argmax_class(&self.row(i, rho))) == self.labels.get(i))
                    .count()
            })
            .collect();
        Ok(best_rho(grid, &correct, known.len()))
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn combine(&self, rho: f64) -> ScoreMatrix {
        let n = self.target.rows();
        let k = self.target.cols();
        let mut out = ScoreMatrix::zeros(n, k);
        for i in 0..n {
            out.row_mut(i).copy_from_slice(&self.row(i, rho));
        }
        out
    }
}

/// WIL score matrix for the labels in `labels`.
pub fn wil_scores(g: &Graph, labels: &LabelSet, config: &PropagationConfig) -> Result<ScoreMatrix> {
    config.validate()?;
    Ok(WilComponents::compute(g, labels, config.alpha, config.solver)?.combine(config.rho))
}

/// Column of the largest entry; ties go to the smallest class.
pub fn argmax_class(row: &[f64]) -> ClassId {
    let mut best = 0;
    for (c, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = c;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Known labels kept as given; unknown nodes get the row argmax.
    pub labels: LabelSet,
    /// Unlabeled nodes whose score row was entirely zero (predicted by the
    /// tie rule alone).
    pub zero_rows: Vec<usize>,
}

pub fn predict(scores: &ScoreMatrix, known: &LabelSet) -> Result<Prediction> {
    if scores.rows() != known.len() || scores.cols() != known.num_classes() {
        return Err(Error::Input(format!(
            "score matrix is {}x{} but labels cover {} nodes and {} classes",
            scores.rows(),
            scores.cols(),
            known.len(),
            known.num_classes()
        )));
    }
    if scores.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("score matrix contains non-finite values".into()));
    }
    let mut zero_rows = Vec::new();
    let labels = (0..known.len())
        .map(|i| {
            Some(known.get(i).unwrap_or_else(|| {
                let row = scores.row(i);
                if row.iter().all(|&v| v == 0.0) {
                    zero_rows.push(i);
                }
                argmax_class(row)
            }))
        })
        .collect();
    Ok(Prediction {
        labels: LabelSet::new(known.num_classes(), labels)?,
        zero_rows,
    })
}

/// The mixing-weight grid `{0, 0.1, ..., 1}`.
pub fn rho_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// How the accuracy of a candidate `rho` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhoTuning {
    /// Score every labeled node with its own label removed from the mixing
    /// matrix diagonal.
    #[default]
    InSample,
    /// Hide one fold of the labeled nodes at a time and score it.
    KFold { folds: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhoSelection {
    pub rho: f64,
    /// `(rho, accuracy)` for every grid point, in grid order.
    pub accuracy: Vec<(f64, f64)>,
}

/// Picks the grid value whose WIL prediction best recovers the known labels.
/// Ties go to the smallest `rho`.
pub fn tune_rho(
    g: &Graph,
    observed: &LabelSet,
    alpha: f64,
    grid: &[f64],
    solver: Solver,
    mode: RhoTuning,
) -> Result<RhoSelection> {
    validate_grid(grid)?;
    let known = observed.known();
    if known.is_empty() {
        return Err(Error::Input("rho tuning needs at least one labeled node".into()));
    }
    let mut correct = vec![0usize; grid.len()];
    match mode {
        RhoTuning::InSample => {
            return WilComponents::compute(g, observed, alpha, solver)?.select_rho(grid);
        }
        RhoTuning::KFold { folds, seed } => {
            if folds < 2 || known.len() < folds {
                return Err(Error::Parameter(format!(
                    "{folds}-fold tuning needs at least {folds} labeled nodes and folds >= 2"
                )));
            }
            let mut order = known.clone();
            order.shuffle(&mut rng::stream(seed, 0, Stage::Folds));
            for f in 0..folds {
                let held: Vec<usize> = order.iter().skip(f).step_by(folds).copied().collect();
                let train = observed.hide(&held);
                let comps = WilComponents::compute_inner(g, &train, alpha, solver, false)?;
                for (slot, &rho) in correct.iter_mut().zip(grid) {
                    *slot += held
                        .iter()
                        .filter(|&&i| Some(argmax_class(&comps.row(i, rho))) == observed.get(i))
                        .count();
                }
            }
        }
    }
    Ok(best_rho(grid, &correct, known.len()))
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Input("rho grid is empty".into()));
    }
    if let Some(r) = grid.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::Parameter(format!("rho = {r} outside [0, 1]")));
    }
    Ok(())
}

fn best_rho(grid: &[f64], correct: &[usize], total: usize) -> RhoSelection {
    let best = correct.iter().copied().max().unwrap();
    let rho = grid
        .iter()
        .zip(correct)
        .filter(|(_, &c)| c == best)
        .map(|(&r, _)| r)
        .fold(f64::INFINITY, f64::min);
    RhoSelection {
        rho,
        accuracy: grid
            .iter()
            .zip(correct)
            .map(|(&r, &c)| (r, c as f64 / total as f64))
            .collect(),
    }
}
