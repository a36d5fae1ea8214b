//! Reading real networks from disk.
//!
//! Edge lists are UTF-8 text with one `u v` pair per line (any whitespace
//! between the two ids); blank lines and lines starting with `#` are
//! skipped. Node ids are arbitrary tokens, numbered `0..n` in first-seen
//! order. Label files are CSV rows `id,label` with an optional `id,label`
//! header; classes are numbered in sorted name order (numeric order when
//! every name is an integer), so labels `1..K` map to classes `1..K`.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labels::{ClassId, LabelSet};
use crate::rng::{self, Stage};

/// External id of every internal node index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of `id`, assigning the next free one if it is new.
    pub fn intern(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        self.names.push(id.to_string());
        self.index.insert(id.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    fn restrict(&self, keep: &[usize]) -> IdMap {
        let mut out = IdMap::default();
        for &i in keep {
            out.intern(&self.names[i]);
        }
        out
    }
}

/// Raw edge list: pairs of dense indices plus the id map that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub ids: IdMap,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn to_graph(&self) -> Result<Graph> {
        Graph::from_edges(self.ids.len(), &self.edges)
    }
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))
}

/// Parses an edge list from a reader; `path` is only used in messages.
pub fn parse_edge_list<R: Read>(input: R, path: &Path) -> Result<EdgeList> {
    let mut ids = IdMap::default();
    let mut edges = Vec::new();
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = tokens.as_slice() else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("expected two node ids, found {}", tokens.len()),
            });
        };
        let (u, v) = (ids.intern(u), ids.intern(v));
        edges.push((u, v));
    }
    Ok(EdgeList { ids, edges })
}

pub fn read_edge_list(path: &Path) -> Result<EdgeList> {
    parse_edge_list(open(path)?, path)
}

/// Labels read from file, with the class names in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelFile {
    pub labels: LabelSet,
    pub classes: Vec<String>,
}

/// Parses `id,label` rows against the node ids in `ids`. Nodes missing from
/// the file stay unlabeled.
pub fn parse_labels<R: Read>(input: R, ids: &IdMap, path: &Path) -> Result<LabelFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut classes: Vec<String> = Vec::new();
    let mut labels: Vec<Option<ClassId>> = vec![None; ids.len()];
    let mut unknown: Vec<String> = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(row + 1, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected id,label, found {} fields", rec.len()),
            });
        }
        if row == 0 && &rec[0] == "id" && &rec[1] == "label" {
            continue;
        }
        let Some(node) = ids.get(&rec[0]) else {
            unknown.push(rec[0].to_string());
            continue;
        };
        let class = match classes.iter().position(|c| c == &rec[1]) {
            Some(c) => c,
            None => {
                classes.push(rec[1].to_string());
                classes.len() - 1
            }
        };
        match labels[node] {
            Some(prev) if prev != class => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!(
                        "node {} labeled both {:?} and {:?}",
                        &rec[0], classes[prev], &rec[1]
                    ),
                })
            }
            _ => labels[node] = Some(class),
        }
    }
    if !unknown.is_empty() {
        let shown: Vec<&str> = unknown.iter().take(10).map(String::as_str).collect();
        return Err(Error::Input(format!(
            "{}: {} label ids are not in the graph: {}{}",
            path.display(),
            unknown.len(),
            shown.join(", "),
            if unknown.len() > 10 { ", ..." } else { "" }
        )));
    }
    let (classes, remap) = sorted_classes(classes);
    let labels = labels.into_iter().map(|l| l.map(|c| remap[c])).collect();
    Ok(LabelFile {
        labels: LabelSet::new(classes.len().max(1), labels)?,
        classes,
    })
}

/// Sorts class names (numerically when every name is an integer) and
/// returns the old-to-new index map.
fn sorted_classes(classes: Vec<String>) -> (Vec<String>, Vec<ClassId>) {
    let numeric: Option<Vec<i64>> = classes.iter().map(|c| c.parse().ok()).collect();
    let mut order: Vec<usize> = (0..classes.len()).collect();
    match &numeric {
        Some(v) => order.sort_by_key(|&i| v[i]),
        None => order.sort_by(|&a, &b| classes[a].cmp(&classes[b])),
    }
    let mut remap = vec![0; classes.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let sorted = order.iter().map(|&i| classes[i].clone()).collect();
    (sorted, remap)
}

pub fn read_labels(path: &Path, ids: &IdMap) -> Result<LabelFile> {
    parse_labels(open(path)?, ids, path)
}

/// A graph with its labels, external ids and class names.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub name: String,
    pub graph: Graph,
    pub labels: LabelSet,
    pub ids: IdMap,
    pub classes: Vec<String>,
}

impl DatasetBundle {
    /// Reads an edge list and a label file.
    pub fn load(name: &str, edges: &Path, labels: &Path) -> Result<Self> {
        let list = read_edge_list(edges)?;
        let graph = list.to_graph()?;
        let file = read_labels(labels, &list.ids)?;
        Ok(DatasetBundle {
            name: name.to_string(),
            graph,
            labels: file.labels,
            ids: list.ids,
            classes: file.classes,
        })
    }

    fn restrict(&self, keep: &[usize]) -> DatasetBundle {
        DatasetBundle {
            name: self.name.clone(),
            graph: self.graph.induced_subgraph(keep),
            labels: self.labels.restrict(keep),
            ids: self.ids.restrict(keep),
            classes: self.classes.clone(),
        }
    }

    /// Drops classes no remaining node carries, keeping the order of the rest.
    fn compact_classes(mut self) -> Result<DatasetBundle> {
        let counts = self.labels.class_counts();
        let mut remap: Vec<Option<ClassId>> = vec![None; self.classes.len()];
        let mut names = Vec::new();
        for (c, name) in self.classes.iter().enumerate() {
            if counts.get(c).copied().unwrap_or(0) > 0 {
                remap[c] = Some(names.len());
                names.push(name.clone());
            }
        }
        let labels = self
            .labels
            .as_slice()
            .iter()
            .map(|l| l.and_then(|c| remap[c]))
            .collect();
        self.labels = LabelSet::new(names.len().max(1), labels)?;
        self.classes = names;
        Ok(self)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Preprocess {
    /// Remove nodes without a label before taking the largest component.
    pub drop_unlabeled: bool,
    /// Keep only these class names (their nodes become unlabeled otherwise,
    /// and are removed if `drop_unlabeled` is set).
    pub keep_classes: Option<Vec<String>>,
}

/// Optional label filtering, then the largest connected component, with
/// node and class indices renumbered.
pub fn preprocess(bundle: &DatasetBundle, opts: &Preprocess) -> Result<DatasetBundle> {
    let mut current = bundle.clone();
    if let Some(keep) = &opts.keep_classes {
        let allowed: Vec<bool> = current.classes.iter().map(|c| keep.contains(c)).collect();
        let filtered = current
            .labels
            .as_slice()
            .iter()
            .map(|l| l.filter(|&c| allowed[c]))
            .collect();
        current.labels = LabelSet::new(current.labels.num_classes(), filtered)?;
    }
    if opts.drop_unlabeled {
        current = current.restrict(&current.labels.known());
    }
    let (_, members) = current.graph.largest_component()?;
    current.restrict(&members).compact_classes()
}

/// Hides `round(rate * n)` labels chosen uniformly at random.
pub fn mask_labels(labels: &LabelSet, rate: f64, seed: u64) -> Result<LabelSet> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Parameter(format!("unknown rate {rate} outside [0, 1]")));
    }
    let n = labels.len();
    let hidden = ((rate * n as f64) + 0.5).floor() as usize;
    let mut rng = rng::stream(seed, 0, Stage::Mask);
    let chosen = index::sample(&mut rng, n, hidden.min(n)).into_vec();
    Ok(labels.hide(&chosen))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub nodes: usize,
    pub edges: usize,
    pub classes: usize,
    /// `2|E| / n`.
    pub average_degree: f64,
}

impl DatasetStats {
    /// Average degree rounded to two decimals.
    pub fn average_degree_2dp(&self) -> String {
        format!("{:.2}", self.average_degree)
    }
}

impl std::fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "nodes={} edges={} classes={} average_degree={}",
            self.nodes,
            self.edges,
            self.classes,
            self.average_degree_2dp()
        )
    }
}

pub fn dataset_stats(bundle: &DatasetBundle) -> DatasetStats {
    let n = bundle.graph.node_count();
    let e = bundle.graph.edge_count();
    let present = bundle.labels.class_counts().iter().filter(|&&c| c > 0).count();
    DatasetStats {
        nodes: n,
        edges: e,
        classes: present,
        average_degree: if n == 0 { 0.0 } else { 2.0 * e as f64 / n as f64 },
    }
}

/// One `u v` line per undirected edge, using external ids.
pub fn write_edge_list<W: Write>(g: &Graph, ids: Option<&IdMap>, mut out: W) -> Result<()> {
    let name = |i: usize| ids.map_or_else(|| i.to_string(), |m| m.name(i).to_string());
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", name(u), name(v)).map_err(|e| Error::io("writing edge list", e))?;
    }
    out.flush().map_err(|e| Error::io("writing edge list", e))
}

/// `id,label` rows for labeled nodes, with header. Class names default to
/// `1..K`.
pub fn write_labels<W: Write>(
    labels: &LabelSet,
    ids: Option<&IdMap>,
    classes: Option<&[String]>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "label"])?;
    for i in labels.known() {
        let c = labels.get(i).unwrap();
        let id = ids.map_or_else(|| i.to_string(), |m| m.name(i).to_string());
        let class = classes.map_or_else(|| (c + 1).to_string(), |cs| cs[c].clone());
        w.write_record([id, class])?;
    }
    w.flush().map_err(|e| Error::io("writing labels", e))
}

/// Hides the labels of isolated nodes, which an edge list cannot name.
pub fn without_isolated(labels: &LabelSet, g: &Graph) -> LabelSet {
    let isolated: Vec<usize> = (0..g.node_count()).filter(|&i| g.degree(i) == 0).collect();
    labels.hide(&isolated)
}

/// Preprocessing and published statistics for a public benchmark network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recipe {
    /// File stem: `<dir>/<name>.edges` and `<dir>/<name>.labels.csv`.
    pub name: &'static str,
    pub drop_unlabeled: bool,
    pub keep_classes: Option<&'static [&'static str]>,
    /// `(nodes, classes, average degree to two decimals)` after preprocessing.
    pub reference: (usize, usize, &'static str),
}

impl Recipe {
    pub fn preprocess_options(&self) -> Preprocess {
        Preprocess {
            drop_unlabeled: self.drop_unlabeled,
            keep_classes: self
                .keep_classes
                .map(|cs| cs.iter().map(|c| c.to_string()).collect()),
        }
    }

    /// Loads and preprocesses the dataset, or `None` when either file is
    /// missing from `dir`.
    pub fn load(&self, dir: &Path) -> Result<Option<DatasetBundle>> {
        let edges = dir.join(format!("{}.edges", self.name));
        let labels = dir.join(format!("{}.labels.csv", self.name));
        if !edges.is_file() || !labels.is_file() {
            return Ok(None);
        }
        let raw = DatasetBundle::load(self.name, &edges, &labels)?;
        preprocess(&raw, &self.preprocess_options()).map(Some)
    }

    /// Whether `stats` reproduces the published triple exactly.
    pub fn matches(&self, stats: &DatasetStats) -> bool {
        let (n, k, deg) = self.reference;
        stats.nodes == n && stats.classes == k && stats.average_degree_2dp() == deg
    }
}

/// Political blogs (largest component), Simmons College (class years
/// 2006 to 2009, students without a year removed) and Caltech (students
/// without a residence removed).
pub const RECIPES: [Recipe; 3] = [
    Recipe {
        name: "polblogs",
        drop_unlabeled: false,
        keep_classes: None,
        reference: (1222, 2, "27.36"),
    },
    Recipe {
        name: "simmons",
        drop_unlabeled: true,
        keep_classes: Some(&["2006", "2007", "2008", "2009"]),
        reference: (1137, 4, "42.67"),
    },
    Recipe {
        name: "caltech",
        drop_unlabeled: true,
        keep_classes: None,
        reference: (590, 8, "43.46"),
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(text: &str) -> Result<EdgeList> {
        parse_edge_list(text.as_bytes(), Path::new("t.edges"))
    }

    #[test]
    fn edge_list_basics() {
        let e = edges("0 1\n1 2").unwrap();
        assert_eq!(e.node_count(), 3);
        assert_eq!(e.to_graph().unwrap().edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let e = edges("# c\na b\nb a\n").unwrap();
        assert_eq!(e.to_graph().unwrap().edge_count(), 1);
        let e = edges("\n x\ty \n\n").unwrap();
        assert_eq!(e.edges, vec![(0, 1)]);
    }

    #[test]
    fn edge_list_reports_line() {
        let err = edges("0 1\n\n1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(edges("lonely\n").is_err());
    }

    fn ids(names: &[&str]) -> IdMap {
        let mut m = IdMap::default();
        for n in names {
            m.intern(n);
        }
        m
    }

    #[test]
    fn labels_numbered_in_name_order() {
        let m = ids(&["x", "y", "z"]);
        let f = parse_labels("id,label\nx,a\ny,a\nz,b\n".as_bytes(), &m, Path::new("l")).unwrap();
        assert_eq!(f.labels.num_classes(), 2);
        assert_eq!(f.labels.as_slice(), &[Some(0), Some(0), Some(1)]);
        assert_eq!(f.classes, vec!["a", "b"]);
        let f = parse_labels("z,b\nx,a\n".as_bytes(), &m, Path::new("l")).unwrap();
        assert_eq!(f.labels.as_slice(), &[Some(0), None, Some(1)]);
        assert_eq!(f.classes, vec!["a", "b"]);
        let f = parse_labels("x,10\ny,9\nz,2\n".as_bytes(), &m, Path::new("l")).unwrap();
        assert_eq!(f.classes, vec!["2", "9", "10"]);
        assert_eq!(f.labels.as_slice(), &[Some(2), Some(1), Some(0)]);
    }

    #[test]
    fn label_errors() {
        let m = ids(&["x", "y"]);
        let err = parse_labels("x,a\nq,a\nw,b\n".as_bytes(), &m, Path::new("l")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('q') && msg.contains('w'), "{msg}");
        let err = parse_labels("x,a\nx,b\n".as_bytes(), &m, Path::new("l")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(parse_labels("x,a\nx,a\n".as_bytes(), &m, Path::new("l")).is_ok());
        assert!(parse_labels("x,a,c\n".as_bytes(), &m, Path::new("l")).is_err());
    }

    fn bundle(edge_text: &str, label_text: &str) -> DatasetBundle {
        let list = edges(edge_text).unwrap();
        let f = parse_labels(label_text.as_bytes(), &list.ids, Path::new("l")).unwrap();
        DatasetBundle {
            name: "t".into(),
            graph: list.to_graph().unwrap(),
            labels: f.labels,
            ids: list.ids,
            classes: f.classes,
        }
    }

    #[test]
    fn preprocess_keeps_largest_component() {
        let b = bundle("a b\nb c\nc a\nd e\n", "a,1\nb,1\nc,2\nd,3\ne,3\n");
        let p = preprocess(&b, &Preprocess::default()).unwrap();
        assert_eq!(p.graph.node_count(), 3);
        assert_eq!(p.ids.names(), &["a", "b", "c"]);
        assert_eq!(p.classes, vec!["1", "2"]);
        assert_eq!(p.labels.num_classes(), 2);
        let again = preprocess(&p, &Preprocess::default()).unwrap();
        assert_eq!(again.graph, p.graph);
        assert_eq!(again.labels, p.labels);
    }

    #[test]
    fn preprocess_drops_unlabeled_and_filters_classes() {
        // c is unlabeled and bridges the two halves
        let b = bundle("a b\nb c\nc d\nd e\ne d\n", "a,x\nb,x\nd,y\ne,z\n");
        let opts = Preprocess {
            drop_unlabeled: true,
            keep_classes: None,
        };
        let p = preprocess(&b, &opts).unwrap();
        assert_eq!(p.graph.node_count(), 2);
        assert_eq!(p.ids.names(), &["a", "b"]);
        let opts = Preprocess {
            drop_unlabeled: true,
            keep_classes: Some(vec!["y".into(), "z".into()]),
        };
        let p = preprocess(&b, &opts).unwrap();
        assert_eq!(p.ids.names(), &["d", "e"]);
        assert_eq!(p.classes, vec!["y", "z"]);
    }

    #[test]
    fn connected_labeled_input_unchanged() {
        let b = bundle("a b\nb c\n", "a,1\nb,2\nc,1\n");
        let p = preprocess(&b, &Preprocess { drop_unlabeled: true, keep_classes: None }).unwrap();
        assert_eq!(p.graph, b.graph);
        assert_eq!(p.labels, b.labels);
    }

    #[test]
    fn masking() {
        let l = LabelSet::full(2, &vec![0; 1000]).unwrap();
        assert_eq!(mask_labels(&l, 0.0, 3).unwrap().known_count(), 1000);
        let m = mask_labels(&l, 0.95, 3).unwrap();
        assert_eq!(m.known_count(), 50);
        assert_eq!(m, mask_labels(&l, 0.95, 3).unwrap());
        assert_ne!(m, mask_labels(&l, 0.95, 4).unwrap());
        assert!(mask_labels(&l, 1.5, 3).is_err());
    }

    #[test]
    fn triangle_stats() {
        let b = bundle("0 1\n1 2\n2 0\n", "0,a\n1,a\n2,b\n");
        let s = dataset_stats(&b);
        assert_eq!((s.nodes, s.edges, s.classes), (3, 3, 2));
        assert_eq!(s.average_degree_2dp(), "2.00");
    }

    #[test]
    fn write_read_round_trip() {
        let b = bundle("p q\nq r\nr p\ns q\n", "p,u\nq,v\nr,u\ns,v\n");
        let mut e = Vec::new();
        write_edge_list(&b.graph, Some(&b.ids), &mut e).unwrap();
        let mut l = Vec::new();
        write_labels(&b.labels, Some(&b.ids), Some(&b.classes), &mut l).unwrap();
        let list = parse_edge_list(e.as_slice(), Path::new("e")).unwrap();
        let f = parse_labels(l.as_slice(), &list.ids, Path::new("l")).unwrap();
        let g = list.to_graph().unwrap();
        assert_eq!(g.edge_count(), b.graph.edge_count());
        for (u, v) in b.graph.edges() {
            let (a, c) = (list.ids.get(b.ids.name(u)).unwrap(), list.ids.get(b.ids.name(v)).unwrap());
            assert!(g.has_edge(a, c));
        }
        for i in 0..4 {
            let j = list.ids.get(b.ids.name(i)).unwrap();
            assert_eq!(
                f.classes[f.labels.get(j).unwrap()],
                b.classes[b.labels.get(i).unwrap()]
            );
        }
    }
}
