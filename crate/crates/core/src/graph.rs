//! Immutable undirected graphs in compressed sparse row form, plus the
//! degree-normalized adjacency operators every propagation kernel is built
//! from.
//!
//! Nodes are dense `0..n` ids. Self-loops and duplicate edges are dropped at
//! construction. A node of degree zero has a zero row and a zero column in
//! every normalized operator.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scores::ScoreMatrix;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a simple undirected graph from an arbitrary edge list.
    ///
    /// Both orientations of a pair collapse to one edge and `(u, u)` is
    /// ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u != v {
                degree[u] += 1;
                degree[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; *offsets.last().unwrap()];
        for &(u, v) in edges {
            if u != v {
                neighbors[fill[u]] = v;
                fill[u] += 1;
                neighbors[fill[v]] = u;
                fill[v] += 1;
            }
        }
        // sort + dedup each adjacency row, then compact
        let mut compact_offsets = Vec::with_capacity(n + 1);
        compact_offsets.push(0);
        let mut write = 0;
        for i in 0..n {
            let row = &mut neighbors[offsets[i]..offsets[i + 1]];
            row.sort_unstable();
            let mut last = usize::MAX;
            for r in offsets[i]..offsets[i + 1] {
                let v = neighbors[r];
                if v != last {
                    neighbors[write] = v;
                    write += 1;
                    last = v;
                }
            }
            compact_offsets.push(write);
        }
        neighbors.truncate(write);
        Ok(Graph {
            offsets: compact_offsets,
            neighbors,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|i| self.degree(i)).collect()
    }

    /// Sorted neighbors of `i`.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count())
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
            .filter(|(u, v)| u < v)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.node_count())
            .map(|i| self.degree(i))
            .min()
            .unwrap_or(0)
    }

    /// `1/d_i`, or 0 for isolated nodes.
    pub fn inverse_degrees(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|i| match self.degree(i) {
                0 => 0.0,
                d => 1.0 / d as f64,
            })
            .collect()
    }

    /// Component id per node; ids are numbered in order of each component's
    /// smallest node.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Subgraph induced by `keep`. New node `j` is old node `keep[j]`.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Graph {
        let mut new_id = vec![usize::MAX; self.node_count()];
        for (j, &i) in keep.iter().enumerate() {
            new_id[i] = j;
        }
        let edges: Vec<(usize, usize)> = keep
            .iter()
            .enumerate()
            .flat_map(|(j, &i)| {
                let new_id = &new_id;
                self.neighbors(i)
                    .iter()
                    .filter_map(move |&v| (new_id[v] != usize::MAX).then(|| (j, new_id[v])))
            })
            .filter(|(a, b)| a < b)
            .collect();
        Graph::from_edges(keep.len(), &edges).expect("ids are in range by construction")
    }

    /// Induced subgraph on the largest connected component, together with the
    /// map from new ids to original ids (ascending).
    ///
    /// Among components of equal size the one holding the smallest node id
    /// wins.
    pub fn largest_component(&self) -> Result<(Graph, Vec<usize>)> {
        if self.node_count() == 0 {
            return Err(Error::Input("graph has no nodes".into()));
        }
        let comp = self.components();
        let count = comp.iter().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        // component ids follow smallest-member order, so the first maximum wins ties
        let best = (0..count).fold(0, |b, c| if sizes[c] > sizes[b] { c } else { b });
        let keep: Vec<usize> = (0..self.node_count()).filter(|&i| comp[i] == best).collect();
        Ok((self.induced_subgraph(&keep), keep))
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Graph::from_edges(self.node_count(), &edges).expect("permutation stays in range")
    }

    /// `D^-1 A x`: row `i` is the mean of `x` over the neighbors of `i`.
    pub fn apply_row_normalized(&self, x: &ScoreMatrix) -> ScoreMatrix {
        let inv = self.inverse_degrees();
        let mut out = ScoreMatrix::zeros(x.rows(), x.cols());
        self.apply_row_normalized_into(&inv, x, &mut out);
        out
    }

    /// `A D^-1 x`: each neighbor `j` contributes `x_j / d_j`.
    pub fn apply_col_normalized(&self, x: &ScoreMatrix) -> ScoreMatrix {
        let inv = self.inverse_degrees();
        let mut out = ScoreMatrix::zeros(x.rows(), x.cols());
        self.apply_col_normalized_into(&inv, x, &mut out);
        out
    }

    /// `D^-1/2 A D^-1/2 x`.
    pub fn apply_sym_normalized(&self, x: &ScoreMatrix) -> ScoreMatrix {
        let inv_sqrt: Vec<f64> = self.inverse_degrees().iter().map(|v| v.sqrt()).collect();
        let mut out = ScoreMatrix::zeros(x.rows(), x.cols());
        self.apply_sym_normalized_into(&inv_sqrt, x, &mut out);
        out
    }

    pub(crate) fn apply_row_normalized_into(
        &self,
        inv_degree: &[f64],
        x: &ScoreMatrix,
        out: &mut ScoreMatrix,
    ) {
        self.check_shape(x, out);
        for i in 0..self.node_count() {
            let row = out.row_mut(i);
            row.fill(0.0);
            for &j in self.neighbors(i) {
                for (o, v) in row.iter_mut().zip(x.row(j)) {
                    *o += v;
                }
            }
            row.iter_mut().for_each(|o| *o *= inv_degree[i]);
        }
    }

    pub(crate) fn apply_col_normalized_into(
        &self,
        inv_degree: &[f64],
        x: &ScoreMatrix,
        out: &mut ScoreMatrix,
    ) {
        self.check_shape(x, out);
        for i in 0..self.node_count() {
            let row = out.row_mut(i);
            row.fill(0.0);
            for &j in self.neighbors(i) {
                let w = inv_degree[j];
                for (o, v) in row.iter_mut().zip(x.row(j)) {
                    *o += w * v;
                }
            }
        }
    }

    pub(crate) fn apply_sym_normalized_into(
        &self,
        inv_sqrt_degree: &[f64],
        x: &ScoreMatrix,
        out: &mut ScoreMatrix,
    ) {
        self.check_shape(x, out);
        for i in 0..self.node_count() {
            let row = out.row_mut(i);
            row.fill(0.0);
            for &j in self.neighbors(i) {
                let w = inv_sqrt_degree[j];
                for (o, v) in row.iter_mut().zip(x.row(j)) {
                    *o += w * v;
                }
            }
            row.iter_mut().for_each(|o| *o *= inv_sqrt_degree[i]);
        }
    }

    fn check_shape(&self, x: &ScoreMatrix, out: &ScoreMatrix) {
        assert_eq!(x.rows(), self.node_count(), "operand has wrong row count");
        assert_eq!((x.rows(), x.cols()), (out.rows(), out.cols()));
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count())
            .finish()
    }
}
