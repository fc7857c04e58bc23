//! Undirected simple graphs, ground-truth labels and the dense adjacency
//! matrix with unit diagonal.
//!
//! File formats use 1-based node ids; everything in memory is 0-based.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Unordered node pair stored with the smaller endpoint first.
pub type Edge = (usize, usize);

fn ordered(u: usize, v: usize) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Undirected, unweighted simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<Edge>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph from 0-based pairs. Orientation and duplicates collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        if u == v {
            return Err(Error::SelfLoop {
                line: 0,
                node: u + 1,
            });
        }
        for node in [u, v] {
            if node >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: node + 1,
                    n: self.n,
                });
            }
        }
        Ok(self.edges.insert(ordered(u, v)))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&ordered(u, v))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Returns the graph with node `i` renamed to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Dimension(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.n
            )));
        }
        Self::from_edges(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Parses a whitespace-separated edge list with 1-based ids.
    ///
    /// `n` is the largest id seen. A `# nodes N` comment (as written by
    /// [`Graph::write_edge_list`]) raises `n` to at least `N` so isolated
    /// trailing nodes survive a round trip; all other `#` lines are ignored.
    pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut n = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(hint) = parse_node_hint(comment) {
                    n = n.max(hint);
                }
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let u = parse_id(tokens.next(), lineno)?;
            let v = parse_id(tokens.next(), lineno)?;
            if let Some(extra) = tokens.next() {
                return Err(Error::parse(lineno, format!("unexpected token {extra:?}")));
            }
            if u == v {
                return Err(Error::SelfLoop {
                    line: lineno,
                    node: u,
                });
            }
            n = n.max(u).max(v);
            pairs.push((u - 1, v - 1));
        }
        Self::from_edges(n, pairs)
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        Self::load_edge_list(text.as_bytes())
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# nodes {}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(out, "{}\t{}", u + 1, v + 1)?;
        }
        Ok(())
    }

    /// Dense adjacency with `A[i][i] = 1` and `A[i][j] = 1` iff `{i, j}` is an edge.
    pub fn adjacency(&self) -> AdjacencyMatrix {
        let mut m = DMatrix::identity(self.n, self.n);
        for &(u, v) in &self.edges {
            m[(u, v)] = 1.0;
            m[(v, u)] = 1.0;
        }
        AdjacencyMatrix(m)
    }
}

fn parse_node_hint(comment: &str) -> Option<usize> {
    let mut tokens = comment.split_whitespace();
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some("nodes"), Some(count), None) => count.parse().ok(),
        _ => None,
    }
}

fn parse_id(token: Option<&str>, line: usize) -> Result<usize> {
    let token = token.ok_or_else(|| Error::parse(line, "expected two node ids"))?;
    match token.parse::<usize>() {
        Ok(0) => Err(Error::parse(line, "node ids are 1-based; found 0")),
        Ok(id) => Ok(id),
        Err(_) => Err(Error::parse(line, format!("non-integer node id {token:?}"))),
    }
}

/// Symmetric 0/1 matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix(pub(crate) DMatrix<f64>);

impl AdjacencyMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// Community labels for a subset of nodes. Unlabeled nodes are absent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruth {
    labels: BTreeMap<usize, usize>,
    names: Vec<String>,
}

impl GroundTruth {
    /// Ground truth labelling every node, with community names `"1"`, `"2"`, ...
    pub fn from_assignment(assign: &[usize]) -> Self {
        let k = assign.iter().copied().max().map_or(0, |m| m + 1);
        Self {
            labels: assign.iter().copied().enumerate().collect(),
            names: (1..=k).map(|c| c.to_string()).collect(),
        }
    }

    /// Builds from `(node, label name)` pairs; community ids follow first appearance.
    pub fn from_named<I, S>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, S)>,
        S: AsRef<str>,
    {
        let mut gt = Self::default();
        let mut ids: HashMap<String, usize> = HashMap::new();
        for (node, name) in rows {
            let name = name.as_ref();
            let next = ids.len();
            let id = *ids.entry(name.to_string()).or_insert_with(|| {
                gt.names.push(name.to_string());
                next
            });
            if gt.labels.insert(node, id).is_some() {
                return Err(Error::DuplicateLabel { node: node + 1 });
            }
        }
        Ok(gt)
    }

    /// Parses `node<TAB>label` rows (1-based ids). A `-` label marks the node unlabeled.
    pub fn load_labels<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        let mut seen = BTreeSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let node = parse_id(tokens.next(), lineno)?;
            let label = tokens
                .next()
                .ok_or_else(|| Error::parse(lineno, "missing label"))?;
            if tokens.next().is_some() {
                return Err(Error::parse(lineno, "expected node<TAB>label"));
            }
            if !seen.insert(node) {
                return Err(Error::DuplicateLabel { node });
            }
            if label != "-" {
                rows.push((node - 1, label.to_string()));
            }
        }
        Self::from_named(rows)
    }

    pub fn parse_labels(text: &str) -> Result<Self> {
        Self::load_labels(text.as_bytes())
    }

    /// Writes one row per node in `0..n`, using `-` for unlabeled nodes.
    pub fn write_labels<W: Write>(&self, n: usize, mut out: W) -> Result<()> {
        for node in 0..n {
            match self.labels.get(&node) {
                Some(&c) => writeln!(out, "{}\t{}", node + 1, self.names[c])?,
                None => writeln!(out, "{}\t-", node + 1)?,
            }
        }
        Ok(())
    }

    pub fn label(&self, node: usize) -> Option<usize> {
        self.labels.get(&node).copied()
    }

    pub fn label_name(&self, community: usize) -> Option<&str> {
        self.names.get(community).map(String::as_str)
    }

    pub fn labeled_nodes(&self) -> Vec<usize> {
        self.labels.keys().copied().collect()
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.len()
    }

    pub fn community_count(&self) -> usize {
        self.names.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.labels.iter().map(|(&n, &c)| (n, c))
    }

    /// Members of each community, indexed by community id.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.names.len()];
        for (node, c) in self.iter() {
            out[c].push(node);
        }
        out
    }

    /// Fails if any labeled node lies outside `0..n`.
    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.labels.keys().next_back() {
            Some(&node) if node >= n => Err(Error::NodeOutOfRange { node: node + 1, n }),
            _ => Ok(()),
        }
    }
}
