//! Dense reference implementations shared by the integration tests. Kept
//! deliberately naive: explicit matrices and Gauss-Jordan elimination.

#![allow(dead_code)]

use netprop::{Graph, Kernel, LabelSet, ScoreMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn adjacency(g: &Graph) -> Dense {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    a
}

/// The kernel's normalized operator, with zero rows/columns for isolates.
pub fn operator(g: &Graph, kernel: Kernel) -> Dense {
    let a = adjacency(g);
    let d: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let inv = |x: f64| if x > 0.0 { 1.0 / x } else { 0.0 };
    let n = a.len();
    let mut t = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            t[i][j] = match kernel {
                Kernel::RandomWalk => a[i][j] * inv(d[i]),
                Kernel::SourceNormalized => a[i][j] * inv(d[j]),
                Kernel::NormalizedLaplacian => a[i][j] * inv(d[i]).sqrt() * inv(d[j]).sqrt(),
            };
        }
    }
    t
}

pub fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b).map(|(x, br)| x * br[j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Dense) -> Dense {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// `I - alpha T`.
pub fn system(g: &Graph, kernel: Kernel, alpha: f64) -> Dense {
    let t = operator(g, kernel);
    let n = t.len();
    (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u8 as f64 - alpha * t[i][j]).collect())
        .collect()
}

/// Solves `M X = B` by Gauss-Jordan elimination with partial pivoting.
pub fn solve(m: &Dense, b: &Dense) -> Dense {
    let n = m.len();
    let k = b.first().map_or(0, Vec::len);
    let mut aug: Dense = m
        .iter()
        .zip(b)
        .map(|(r, br)| r.iter().chain(br).copied().collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))
            .unwrap();
        assert!(aug[piv][col].abs() > 1e-14, "singular oracle system");
        aug.swap(col, piv);
        let p = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in col..n + k {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn inverse(m: &Dense) -> Dense {
    solve(m, &identity(m.len()))
}

pub fn to_dense(s: &ScoreMatrix) -> Dense {
    (0..s.rows()).map(|i| s.row(i).to_vec()).collect()
}

pub fn indicator(labels: &LabelSet) -> Dense {
    to_dense(&labels.indicator())
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// WIL scores with the mixing matrix built explicitly and its diagonal
/// zeroed.
pub fn wil_oracle(g: &Graph, labels: &LabelSet, alpha: f64, rho: f64) -> Dense {
    let w = inverse(&system(g, Kernel::RandomWalk, alpha));
    let wt = transpose(&w);
    let n = w.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[i][j] = rho * w[i][j] + (1.0 - rho) * wt[i][j];
            }
        }
    }
    mat_mul(&m, &indicator(labels))
}

/// Erdos-Renyi graph on `n` nodes.
pub fn gnp<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// `gnp` plus a ring through every node, so each degree is at least 2.
pub fn connected_gnp<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Every node labeled with probability `frac`, classes uniform over `k`;
/// at least one label is always present.
pub fn random_labels<R: Rng>(rng: &mut R, n: usize, k: usize, frac: f64) -> LabelSet {
    let mut labels: Vec<Option<usize>> = (0..n)
        .map(|_| (rng.random::<f64>() < frac).then(|| rng.random_range(0..k)))
        .collect();
    if labels.iter().all(Option::is_none) {
        labels[0] = Some(0);
    }
    LabelSet::new(k, labels).unwrap()
}
