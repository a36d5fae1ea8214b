use crate::error::{Error, Result};
use crate::scores::ScoreMatrix;

/// Class index in `0..k`. Files and reports use the 1-based form.
pub type ClassId = usize;

/// Partial assignment of nodes to `k` classes.
///
/// `None` marks a node whose label is unknown. Classes are stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    k: usize,
    labels: Vec<Option<ClassId>>,
}

impl LabelSet {
    pub fn new(k: usize, labels: Vec<Option<ClassId>>) -> Result<Self> {
        if k < 1 {
            return Err(Error::Input("a label set needs at least one class".into()));
        }
        if let Some((i, c)) = labels
            .iter()
            .enumerate()
            .find_map(|(i, l)| l.filter(|&c| c >= k).map(|c| (i, c)))
        {
            return Err(Error::Input(format!(
                "node {i} has class {} but only {k} classes exist",
                c + 1
            )));
        }
        Ok(LabelSet { k, labels })
    }

    /// Fully labeled set.
    pub fn full(k: usize, classes: &[ClassId]) -> Result<Self> {
        Self::new(k, classes.iter().copied().map(Some).collect())
    }

    pub fn unlabeled(n: usize, k: usize) -> Self {
        LabelSet {
            k,
            labels: vec![None; n],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<ClassId> {
        self.labels[i]
    }

    pub fn as_slice(&self) -> &[Option<ClassId>] {
        &self.labels
    }

    pub fn is_known(&self, i: usize) -> bool {
        self.labels[i].is_some()
    }

    /// Indices of labeled nodes, ascending.
    pub fn known(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_known(i)).collect()
    }

    /// Indices of unlabeled nodes, ascending.
    pub fn unknown(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_known(i)).collect()
    }

    pub fn known_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    /// Per-class counts over labeled nodes.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k];
        for c in self.labels.iter().flatten() {
            counts[*c] += 1;
        }
        counts
    }

    /// The indicator matrix: `Y[i][c] = 1` iff node `i` is labeled `c`.
    pub fn indicator(&self) -> ScoreMatrix {
        let mut y = ScoreMatrix::zeros(self.len(), self.k);
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(c) = l {
                y.set(i, *c, 1.0);
            }
        }
        y
    }

    /// Same classes with the given nodes' labels hidden.
    pub fn hide(&self, nodes: &[usize]) -> LabelSet {
        let mut labels = self.labels.clone();
        for &i in nodes {
            labels[i] = None;
        }
        LabelSet { k: self.k, labels }
    }

    /// Labels restricted to `keep` (new node `j` is old node `keep[j]`).
    pub fn restrict(&self, keep: &[usize]) -> LabelSet {
        LabelSet {
            k: self.k,
            labels: keep.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Copy with `out[perm[i]] = self[i]`.
    pub fn permute(&self, perm: &[usize]) -> LabelSet {
        let mut labels = vec![None; self.len()];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i];
        }
        LabelSet { k: self.k, labels }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_encodes_known_labels() {
        let l = LabelSet::new(3, vec![Some(2), None, Some(0)]).unwrap();
        let y = l.indicator();
        assert_eq!(y.row(0), &[0.0, 0.0, 1.0]);
        assert_eq!(y.row(1), &[0.0, 0.0, 0.0]);
        assert_eq!(y.row(2), &[1.0, 0.0, 0.0]);
        assert_eq!(l.known(), vec![0, 2]);
        assert_eq!(l.unknown(), vec![1]);
        assert_eq!(l.class_counts(), vec![1, 0, 1]);
    }

    #[test]
    fn out_of_range_class_is_rejected() {
        assert!(matches!(
            LabelSet::new(2, vec![Some(2)]),
            Err(Error::Input(_))
        ));
    }
}
