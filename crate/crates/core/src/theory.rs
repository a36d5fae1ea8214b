//! Closed forms for the two-block, degree-homogeneous model.
//!
//! Convention throughout: block 1 is the block the scored node belongs to,
//! labeled nodes carry `+1` in block 1 and `-1` in block 2, and the expected
//! adjacency `P` has `p` on diagonal blocks (including the diagonal itself)
//! and `q` off them. With `n1 = s n2` and `l_i = delta n_i` the expected
//! score of an unlabeled block-1 node depends on `(alpha, delta, s, beta)`
//! only; its sign decides whether that block is recovered.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::propagate::Kernel;

pub type KernelKind = Kernel;

/// Smallest balance `s` for which the source-normalized kernel separates
/// classes at out-in ratio `beta`: the positive root of
/// `beta s^2 + (1 - beta) s - beta^2 = 0`.
pub fn g_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Parameter(format!("beta = {beta} outside (0, 1]")));
    }
    let radicand = 4.0 * beta.powi(3) + beta * beta - 2.0 * beta + 1.0;
    Ok(((beta - 1.0) + radicand.sqrt()) / (2.0 * beta))
}

/// Constant values of the four blocks of a `(n1 + n2)` square matrix
/// `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockValues {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCounts {
    pub n1: usize,
    pub n2: usize,
    pub l1: usize,
    pub l2: usize,
}

/// `[(I - W)^-1 Y]_i` for an unlabeled node `i` of block 1, where `W` has
/// constant blocks and `Y` is `+1` on the first `l1` nodes of block 1, `-1`
/// on the first `l2` nodes of block 2.
///
/// Cramer's rule on the two block sums gives
/// `(a l1 + b c n2 l1 - b l2 - a d n2 l1) / ((1 - n1 a)(1 - n2 d) - n1 n2 b c)`.
pub fn block_inverse_entry(w: BlockValues, counts: BlockCounts) -> Result<f64> {
    let BlockCounts { n1, n2, l1, l2 } = counts;
    if l1 >= n1 || l2 > n2 {
        return Err(Error::Parameter(format!(
            "need l1 < n1 and l2 <= n2 (got l1={l1}, n1={n1}, l2={l2}, n2={n2})"
        )));
    }
    let (n1, n2, l1, l2) = (n1 as f64, n2 as f64, l1 as f64, l2 as f64);
    let BlockValues { a, b, c, d } = w;
    let det = (1.0 - n1 * a) * (1.0 - n2 * d) - n1 * n2 * b * c;
    if det.abs() < 1e-12 {
        return Err(Error::Singular(format!("block determinant {det:e}")));
    }
    Ok((a * l1 + b * c * n2 * l1 - b * l2 - a * d * n2 * l1) / det)
}

/// The `alpha`-free part of the expected-score numerator. Positive exactly
/// when the kernel's consistency condition holds.
pub fn boundary_margin(kind: KernelKind, s: f64, beta: f64) -> f64 {
    match kind {
        Kernel::RandomWalk => s - beta,
        Kernel::NormalizedLaplacian => {
            s + beta * s * s - beta * ((beta + s) * (1.0 + beta * s)).sqrt()
        }
        Kernel::SourceNormalized => s + beta * s * s - beta * s - beta * beta,
    }
}

/// Whether the kernel's expected score keeps the correct sign on the
/// smaller block, i.e. whether it can recover that block at all.
pub fn boundary_condition(kind: KernelKind, s: f64, beta: f64) -> bool {
    boundary_margin(kind, s, beta) > 0.0
}

/// Expected score of an unlabeled node in the smaller block.
///
/// Numerators:
/// - random walk: `alpha delta ((s - beta)(1 + beta s) - alpha s (1 - beta^2))`
/// - normalized Laplacian: `alpha delta (s + beta s^2 - beta sqrt((beta + s)(1 + beta s)) - alpha s (1 - beta^2))`
/// - source-normalized: `alpha delta (s + beta s^2 - beta s - beta^2 - alpha s (1 - beta^2))`
///
/// over the common denominator
/// `(1 - alpha)((beta + s)(1 + beta s) - alpha s (1 - beta^2))`.
pub fn closed_form_score(kind: KernelKind, alpha: f64, delta: f64, s: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Parameter(format!("delta = {delta} outside [0, 1]")));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Parameter(format!("s = {s} outside (0, 1]")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Parameter(format!("beta = {beta} outside (0, 1]")));
    }
    let damping = alpha * s * (1.0 - beta * beta);
    let mixing = match kind {
        Kernel::RandomWalk => (s - beta) * (1.0 + beta * s),
        _ => boundary_margin(kind, s, beta),
    };
    let denominator = (1.0 - alpha) * ((beta + s) * (1.0 + beta * s) - damping);
    if denominator.abs() < 1e-300 {
        return Err(Error::Singular("closed-form denominator vanishes".into()));
    }
    Ok(alpha * delta * (mixing - damping) / denominator)
}

/// Two-block planted partition with labeled counts per block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBlockSpec {
    pub n1: usize,
    pub n2: usize,
    pub l1: usize,
    pub l2: usize,
    pub p: f64,
    pub q: f64,
}

impl TwoBlockSpec {
    pub fn new(n1: usize, n2: usize, l1: usize, l2: usize, p: f64, q: f64) -> Result<Self> {
        let spec = TwoBlockSpec { n1, n2, l1, l2, p, q };
        spec.validate()?;
        Ok(spec)
    }

    /// Block 1 of size `round(s n2)` with `round(delta n_i)` labels per block.
    pub fn from_ratios(n2: usize, s: f64, delta: f64, p: f64, beta: f64) -> Result<Self> {
        let n1 = (s * n2 as f64).round() as usize;
        let l1 = (delta * n1 as f64).round() as usize;
        let l2 = (delta * n2 as f64).round() as usize;
        Self::new(n1, n2, l1, l2, p, beta * p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > self.q && self.q > 0.0 && self.p <= 1.0) {
            return Err(Error::Parameter(format!(
                "need 1 >= p > q > 0 (got p={}, q={})",
                self.p, self.q
            )));
        }
        if self.n1 == 0 || self.n2 == 0 || self.l1 > self.n1 || self.l2 > self.n2 {
            return Err(Error::Parameter("block sizes must be positive with l_i <= n_i".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn beta(&self) -> f64 {
        self.q / self.p
    }

    pub fn balance(&self) -> f64 {
        let (a, b) = (self.n1 as f64, self.n2 as f64);
        (a / b).min(b / a)
    }

    pub fn delta(&self) -> f64 {
        (self.l1 + self.l2) as f64 / self.n() as f64
    }

    /// Expected degrees `(d_1, d_2)` of the two blocks.
    pub fn expected_degrees(&self) -> (f64, f64) {
        let (n1, n2) = (self.n1 as f64, self.n2 as f64);
        (n1 * self.p + n2 * self.q, n1 * self.q + n2 * self.p)
    }

    fn counts(&self) -> BlockCounts {
        BlockCounts {
            n1: self.n1,
            n2: self.n2,
            l1: self.l1,
            l2: self.l2,
        }
    }
}

/// Dense expected adjacency `P` (block 1 first). Test-oracle sized only.
pub fn expectation_matrix(spec: &TwoBlockSpec) -> DMatrix<f64> {
    let n = spec.n();
    DMatrix::from_fn(n, n, |i, j| {
        if (i < spec.n1) == (j < spec.n1) {
            spec.p
        } else {
            spec.q
        }
    })
}

/// Block values of `alpha T` where `T` is the kernel's normalization of `P`.
pub fn kernel_blocks(kind: KernelKind, alpha: f64, spec: &TwoBlockSpec) -> BlockValues {
    let (d1, d2) = spec.expected_degrees();
    let (p, q) = (spec.p, spec.q);
    let (a, b, c, d) = match kind {
        Kernel::RandomWalk => (p / d1, q / d1, q / d2, p / d2),
        Kernel::SourceNormalized => (p / d1, q / d2, q / d1, p / d2),
        Kernel::NormalizedLaplacian => {
            let cross = q / (d1 * d2).sqrt();
            (p / d1, cross, cross, p / d2)
        }
    };
    BlockValues {
        a: alpha * a,
        b: alpha * b,
        c: alpha * c,
        d: alpha * d,
    }
}

/// Exact `[(I - alpha T)^-1 Y]_i` for an unlabeled block-1 node, by the
/// block formula on the finite expectation model.
pub fn expected_score(kind: KernelKind, alpha: f64, spec: &TwoBlockSpec) -> Result<f64> {
    spec.validate()?;
    block_inverse_entry(kernel_blocks(kind, alpha, spec), spec.counts())
}

/// `c / (eps^2 (1 - beta)^2 s^2 delta^2 d)`.
pub fn consistency_bound(eps: f64, beta: f64, s: f64, delta: f64, d: f64, c: f64) -> Result<f64> {
    if [eps, s, delta, d, c].iter().any(|v| !(*v > 0.0)) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::Parameter("bound inputs must be positive with beta in [0, 1]".into()));
    }
    Ok(c / (eps * eps * (1.0 - beta).powi(2) * s * s * delta * delta * d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub s: f64,
    pub beta: f64,
    pub kernel: KernelKind,
    pub consistent: bool,
}

/// `boundary_condition` for every kernel at every `(s, beta)` pair, `beta`
/// major.
pub fn boundary_map(s_grid: &[f64], beta_grid: &[f64]) -> Vec<BoundaryPoint> {
    let mut out = Vec::with_capacity(s_grid.len() * beta_grid.len() * 3);
    for &beta in beta_grid {
        for &s in s_grid {
            for kernel in Kernel::ALL {
                out.push(BoundaryPoint {
                    s,
                    beta,
                    kernel,
                    consistent: boundary_condition(kernel, s, beta),
                });
            }
        }
    }
    out
}

/// CSV with header `s,beta,kernel,consistent`.
pub fn write_boundary_csv<W: Write>(points: &[BoundaryPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "beta", "kernel", "consistent"])?;
    for p in points {
        w.write_record([
            p.s.to_string(),
            p.beta.to_string(),
            p.kernel.name().to_string(),
            p.consistent.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("writing boundary map", e))?;
    Ok(())
}
