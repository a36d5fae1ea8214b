//! Partially labeled degree-corrected block model (pDCBM).
//!
//! An instance is drawn in four stages, each from its own RNG stream:
//!
//! 1. classes `z_i ~ Mult(pi)`,
//! 2. popularities `theta_i` from a discrete law,
//! 3. edges `A_ij ~ Bern(theta_i theta_j B[z_i][z_j])` for every unordered pair,
//! 4. a uniformly chosen set of `round(delta n)` nodes reveals a label which
//!    is correct with probability `nu` and otherwise uniform over the other
//!    classes.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labels::{ClassId, LabelSet};
use crate::rng::{self, Stage};

/// Popularity value of low-degree nodes in the two-point law.
pub const LOW_POPULARITY: f64 = 0.2;

/// Symmetric `k x k` matrix of connection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl BlockMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::Parameter("block matrix must be square and non-empty".into()));
        }
        for a in 0..k {
            for b in 0..k {
                let v = rows[a][b];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Parameter(format!(
                        "block probability B[{a}][{b}] = {v} outside [0, 1]"
                    )));
                }
                if (v - rows[b][a]).abs() > 1e-15 * v.abs().max(1.0) {
                    return Err(Error::Parameter("block matrix must be symmetric".into()));
                }
            }
        }
        Ok(BlockMatrix {
            k,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// `q E_k + (p - q) I_k`.
    pub fn planted(k: usize, p: f64, q: f64) -> Result<Self> {
        Self::new(
            (0..k)
                .map(|a| (0..k).map(|b| if a == b { p } else { q }).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, a: ClassId, b: ClassId) -> f64 {
        self.entries[a * self.k + b]
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

/// Block matrix with mean degree `lambda` and out-in ratio `beta`.
///
/// Starts from `B0` (diagonal `1/beta`, off-diagonal `1`) and rescales it by
/// `lambda / ((n - 1) (pi' B0 pi) E[theta]^2)`, which makes the expected
/// degree of a uniformly chosen node equal to `lambda`.
pub fn block_matrix(
    n: usize,
    lambda: f64,
    beta: f64,
    pi: &[f64],
    mean_theta: f64,
) -> Result<BlockMatrix> {
    validate_simplex(pi)?;
    if n < 2 {
        return Err(Error::Parameter("need at least two nodes".into()));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Parameter(format!("beta = {beta} outside (0, 1]")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("lambda = {lambda} must be positive")));
    }
    if !(mean_theta > 0.0 && mean_theta <= 1.0) {
        return Err(Error::Parameter(format!("mean theta = {mean_theta} outside (0, 1]")));
    }
    let k = pi.len();
    let b0 = |a: usize, b: usize| if a == b { 1.0 / beta } else { 1.0 };
    let quad: f64 = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| pi[a] * b0(a, b) * pi[b])
        .sum();
    let scale = lambda / ((n - 1) as f64 * quad * mean_theta * mean_theta);
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|a| (0..k).map(|b| scale * b0(a, b)).collect())
        .collect();
    if let Some(v) = rows.iter().flatten().find(|&&v| v > 1.0) {
        return Err(Error::Parameter(format!(
            "rescaled block probability {v} exceeds 1 (lambda too large for n)"
        )));
    }
    BlockMatrix::new(rows)
}

/// Discrete distribution of node popularity.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaLaw {
    support: Vec<(f64, f64)>,
}

impl ThetaLaw {
    /// `(value, probability)` pairs; values in (0, 1] with maximum exactly 1.
    pub fn new(support: Vec<(f64, f64)>) -> Result<Self> {
        let support: Vec<_> = support.into_iter().filter(|&(_, p)| p > 0.0).collect();
        if support.is_empty() {
            return Err(Error::Parameter("popularity law has no mass".into()));
        }
        let total: f64 = support.iter().map(|s| s.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!("popularity probabilities sum to {total}")));
        }
        if support.iter().any(|&(v, _)| !(v > 0.0 && v <= 1.0)) {
            return Err(Error::Parameter("popularity values must lie in (0, 1]".into()));
        }
        let max = support.iter().map(|s| s.0).fold(0.0, f64::max);
        if max != 1.0 {
            return Err(Error::Parameter(
                "largest popularity value must be 1 for identifiability".into(),
            ));
        }
        Ok(ThetaLaw { support })
    }

    pub fn homogeneous() -> Self {
        ThetaLaw {
            support: vec![(1.0, 1.0)],
        }
    }

    /// `theta = 0.2` with probability `gamma`, else `1`.
    pub fn two_point(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Parameter(format!("gamma = {gamma} outside [0, 1]")));
        }
        if gamma == 1.0 {
            // all mass on the low value; exempt from the max-one normalization
            return Ok(ThetaLaw {
                support: vec![(LOW_POPULARITY, 1.0)],
            });
        }
        Self::new(vec![(LOW_POPULARITY, gamma), (1.0, 1.0 - gamma)])
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|(v, p)| v * p).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.support.iter().map(|s| s.0).fold(0.0, f64::max)
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(v, p) in &self.support {
            acc += p;
            if u < acc {
                return v;
            }
        }
        self.support.last().unwrap().0
    }
}

/// How the revealed set `L` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelSampling {
    /// Uniform subset of all nodes.
    #[default]
    Uniform,
    /// `round(delta n_c)` nodes from every class separately.
    Stratified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockModelParams {
    pub n: usize,
    pub pi: Vec<f64>,
    pub block: BlockMatrix,
    pub theta: ThetaLaw,
    /// Probability a revealed label is correct.
    pub nu: f64,
    /// Fraction of nodes whose label is revealed.
    pub delta: f64,
    pub sampling: LabelSampling,
}

impl BlockModelParams {
    /// The simulation design: two-point popularity law with weight `gamma`
    /// on the low value, and `B` rescaled to mean degree `lambda`.
    pub fn simulation(
        n: usize,
        pi: Vec<f64>,
        lambda: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
    ) -> Result<Self> {
        let theta = ThetaLaw::two_point(gamma)?;
        let block = block_matrix(n, lambda, beta, &pi, theta.mean())?;
        let params = BlockModelParams {
            n,
            pi,
            block,
            theta,
            nu: 1.0,
            delta,
            sampling: LabelSampling::Uniform,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn num_classes(&self) -> usize {
        self.pi.len()
    }

    /// The label-noise matrix: `C[k][k] = nu`, `C[k][l] = (1 - nu)/(K - 1)`.
    pub fn confusion(&self) -> Vec<Vec<f64>> {
        let k = self.num_classes();
        let off = if k > 1 { (1.0 - self.nu) / (k - 1) as f64 } else { 0.0 };
        (0..k)
            .map(|a| (0..k).map(|b| if a == b { self.nu } else { off }).collect())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        validate_simplex(&self.pi)?;
        if self.block.num_classes() != self.pi.len() {
            return Err(Error::Parameter("block matrix and pi disagree on K".into()));
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::Parameter(format!("nu = {} outside [0, 1]", self.nu)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Parameter(format!("delta = {} outside (0, 1]", self.delta)));
        }
        let worst = self.block.max_entry() * self.theta.max_value().powi(2);
        if worst > 1.0 {
            return Err(Error::Parameter(format!("edge probability {worst} exceeds 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub graph: Graph,
    pub truth: LabelSet,
    pub observed: LabelSet,
    pub theta: Vec<f64>,
}

impl GeneratedInstance {
    /// `min_c n_c / max_c n_c` over realized class sizes; equals
    /// `min(n1/n2, n2/n1)` when K = 2.
    pub fn realized_balance(&self) -> f64 {
        class_balance(&self.truth.class_counts())
    }
}

pub(crate) fn class_balance(counts: &[usize]) -> f64 {
    let max = counts.iter().copied().max().unwrap_or(0);
    let min = counts.iter().copied().min().unwrap_or(0);
    if max == 0 {
        0.0
    } else {
        min as f64 / max as f64
    }
}

/// Independent multinomial class draws.
pub fn sample_labels<R: Rng + ?Sized>(n: usize, pi: &[f64], rng: &mut R) -> Result<Vec<ClassId>> {
    validate_simplex(pi)?;
    let last = pi.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (c, &p) in pi.iter().enumerate() {
                acc += p;
                if u < acc && p > 0.0 {
                    return c;
                }
            }
            last
        })
        .collect())
}

/// I.i.d. popularity draws.
pub fn sample_theta<R: Rng + ?Sized>(n: usize, law: &ThetaLaw, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| law.draw(rng)).collect()
}

/// One Bernoulli draw per unordered pair with success probability
/// `theta_i theta_j B[z_i][z_j]`.
pub fn sample_edges<R: Rng + ?Sized>(
    classes: &[ClassId],
    theta: &[f64],
    block: &BlockMatrix,
    rng: &mut R,
) -> Result<Graph> {
    let n = classes.len();
    if theta.len() != n {
        return Err(Error::Input("theta and class vectors differ in length".into()));
    }
    if let Some(&c) = classes.iter().find(|&&c| c >= block.num_classes()) {
        return Err(Error::Input(format!("class {} not covered by block matrix", c + 1)));
    }
    let theta_max = theta.iter().copied().fold(0.0, f64::max);
    let worst = block.max_entry() * theta_max * theta_max;
    if worst > 1.0 {
        return Err(Error::Parameter(format!("edge probability {worst} exceeds 1")));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = theta[i] * theta[j] * block.get(classes[i], classes[j]);
            if p > 0.0 && rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// `round(delta * n)`, halves rounded up.
pub fn revealed_count(delta: f64, n: usize) -> usize {
    ((delta * n as f64) + 0.5).floor() as usize
}

/// Reveals a noisy subset of the true labels.
pub fn observe_labels<R: Rng + ?Sized>(
    truth: &LabelSet,
    delta: f64,
    nu: f64,
    sampling: LabelSampling,
    rng: &mut R,
) -> Result<LabelSet> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!("delta = {delta} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::Parameter(format!("nu = {nu} outside [0, 1]")));
    }
    let n = truth.len();
    let k = truth.num_classes();
    let mut chosen: Vec<usize> = match sampling {
        LabelSampling::Uniform => {
            let m = revealed_count(delta, n).min(n);
            index::sample(rng, n, m).into_vec()
        }
        LabelSampling::Stratified => {
            let mut out = Vec::new();
            for c in 0..k {
                let members: Vec<usize> = (0..n).filter(|&i| truth.get(i) == Some(c)).collect();
                let m = revealed_count(delta, members.len()).min(members.len());
                out.extend(index::sample(rng, members.len(), m).into_iter().map(|j| members[j]));
            }
            out
        }
    };
    chosen.sort_unstable();
    let mut labels = vec![None; n];
    for i in chosen {
        let Some(z) = truth.get(i) else { continue };
        let y = if k > 1 && rng.random::<f64>() >= nu {
            let other = rng.random_range(0..k - 1);
            if other >= z {
                other + 1
            } else {
                other
            }
        } else {
            z
        };
        labels[i] = Some(y);
    }
    LabelSet::new(k, labels)
}

/// Draws one instance for replication `replication` of `master_seed`.
pub fn generate_replication(
    params: &BlockModelParams,
    master_seed: u64,
    replication: u64,
) -> Result<GeneratedInstance> {
    params.validate()?;
    let k = params.num_classes();
    let classes = sample_labels(
        params.n,
        &params.pi,
        &mut rng::stream(master_seed, replication, Stage::Labels),
    )?;
    let theta = sample_theta(
        params.n,
        &params.theta,
        &mut rng::stream(master_seed, replication, Stage::Theta),
    );
    let graph = sample_edges(
        &classes,
        &theta,
        &params.block,
        &mut rng::stream(master_seed, replication, Stage::Edges),
    )?;
    let truth = LabelSet::full(k, &classes)?;
    let observed = observe_labels(
        &truth,
        params.delta,
        params.nu,
        params.sampling,
        &mut rng::stream(master_seed, replication, Stage::Observe),
    )?;
    Ok(GeneratedInstance {
        graph,
        truth,
        observed,
        theta,
    })
}

/// Like [`generate_replication`] but with class sizes fixed at `sizes`
/// (nodes `0..sizes[0]` in class 0, and so on) instead of drawn from `pi`.
pub fn generate_with_sizes(
    params: &BlockModelParams,
    sizes: &[usize],
    master_seed: u64,
    replication: u64,
) -> Result<GeneratedInstance> {
    params.validate()?;
    if sizes.len() != params.num_classes() || sizes.iter().sum::<usize>() != params.n {
        return Err(Error::Parameter(format!(
            "class sizes {sizes:?} do not partition {} nodes into {} classes",
            params.n,
            params.num_classes()
        )));
    }
    let classes: Vec<ClassId> = sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &m)| std::iter::repeat_n(c, m))
        .collect();
    let theta = sample_theta(
        params.n,
        &params.theta,
        &mut rng::stream(master_seed, replication, Stage::Theta),
    );
    let graph = sample_edges(
        &classes,
        &theta,
        &params.block,
        &mut rng::stream(master_seed, replication, Stage::Edges),
    )?;
    let truth = LabelSet::full(params.num_classes(), &classes)?;
    let observed = observe_labels(
        &truth,
        params.delta,
        params.nu,
        params.sampling,
        &mut rng::stream(master_seed, replication, Stage::Observe),
    )?;
    Ok(GeneratedInstance {
        graph,
        truth,
        observed,
        theta,
    })
}

/// Draws one instance; identical seeds give identical instances.
pub fn generate(params: &BlockModelParams, seed: u64) -> Result<GeneratedInstance> {
    generate_replication(params, seed, 0)
}

pub(crate) fn validate_simplex(pi: &[f64]) -> Result<()> {
    if pi.is_empty() {
        return Err(Error::Parameter("class prior is empty".into()));
    }
    if pi.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::Parameter("class prior has a negative entry".into()));
    }
    let total: f64 = pi.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("class prior sums to {total}, not 1")));
    }
    Ok(())
}
