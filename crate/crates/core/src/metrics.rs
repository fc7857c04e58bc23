//! Normalized mutual information and mis-clustering reports.

use std::collections::HashMap;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use crate::error::{Error, Result};
use crate::graph::GroundTruth;
use crate::partition::Partition;

/// Contingency counts between two labelings of the same nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionTable {
    /// `counts[i][j]`: nodes in cluster `i` of the first labeling and `j` of the second.
    pub counts: Vec<Vec<usize>>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub total: usize,
    /// Original label of each row / column index.
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<usize>,
}

impl ConfusionTable {
    pub fn new(first: &[usize], second: &[usize]) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::Dimension(format!(
                "labelings cover {} and {} nodes",
                first.len(),
                second.len()
            )));
        }
        let (row_of, row_labels) = dense_ids(first);
        let (col_of, col_labels) = dense_ids(second);
        let mut counts = vec![vec![0; col_labels.len()]; row_labels.len()];
        for (&a, &b) in first.iter().zip(second) {
            counts[row_of[&a]][col_of[&b]] += 1;
        }
        let rows = counts.iter().map(|r| r.iter().sum()).collect();
        let cols = (0..col_labels.len())
            .map(|j| counts.iter().map(|r| r[j]).sum())
            .collect();
        Ok(Self {
            counts,
            rows,
            cols,
            total: first.len(),
            row_labels,
            col_labels,
        })
    }
}

fn dense_ids(labels: &[usize]) -> (HashMap<usize, usize>, Vec<usize>) {
    let mut sorted: Vec<usize> = labels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let ids = sorted.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    (ids, sorted)
}

/// NMI of two labelings of the same nodes, natural logarithm.
///
/// Returns 0 when either labeling has a single cluster (or no nodes).
pub fn nmi_labels(first: &[usize], second: &[usize]) -> Result<f64> {
    let t = ConfusionTable::new(first, second)?;
    if t.total == 0 || t.rows.len() < 2 || t.cols.len() < 2 {
        return Ok(0.0);
    }
    let n = t.total as f64;
    let mut mutual = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mutual += nij * (nij * n / (t.rows[i] as f64 * t.cols[j] as f64)).ln();
            }
        }
    }
    let entropy = |marginals: &[usize]| -> f64 {
        marginals
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| c as f64 * (c as f64 / n).ln())
            .sum()
    };
    let denom = (entropy(&t.rows) * entropy(&t.cols)).sqrt();
    Ok((mutual / denom).max(0.0))
}

pub fn nmi(first: &Partition, second: &Partition) -> Result<f64> {
    nmi_labels(first.as_slice(), second.as_slice())
}

/// NMI over the labeled nodes only.
pub fn nmi_against_truth(p: &Partition, gt: &GroundTruth) -> Result<f64> {
    let (truth, found) = p.restrict_to(gt)?;
    nmi_labels(&truth, &found)
}

/// Labeled nodes (1-based, sorted) whose computed cluster is not matched to
/// their true community under the agreement-maximizing one-to-one matching.
pub fn misclustered(p: &Partition, gt: &GroundTruth) -> Result<Vec<usize>> {
    let (truth, found) = p.restrict_to(gt)?;
    let nodes = gt.labeled_nodes();
    if nodes.is_empty() {
        return Ok(Vec::new());
    }
    // Renumber clusters by first appearance so tied matchings resolve the
    // same way whatever ids the detector used.
    let mut first_seen: HashMap<usize, usize> = HashMap::new();
    let found: Vec<usize> = found
        .iter()
        .map(|&c| {
            let next = first_seen.len();
            *first_seen.entry(c).or_insert(next)
        })
        .collect();
    let t = ConfusionTable::new(&found, &truth)?;
    let size = t.row_labels.len().max(t.col_labels.len());
    let weights = Matrix::from_fn(size, size, |(i, j)| {
        t.counts
            .get(i)
            .and_then(|r| r.get(j))
            .map_or(0, |&c| c as i64)
    });
    let (_, matched) = kuhn_munkres(&weights);

    let mut truth_for_cluster: HashMap<usize, usize> = HashMap::new();
    for (i, &j) in matched.iter().enumerate() {
        if let (Some(&cluster), Some(&label)) = (t.row_labels.get(i), t.col_labels.get(j)) {
            truth_for_cluster.insert(cluster, label);
        }
    }
    let mut out: Vec<usize> = nodes
        .iter()
        .zip(found.iter().zip(&truth))
        .filter(|(_, (c, l))| truth_for_cluster.get(c) != Some(l))
        .map(|(&node, _)| node + 1)
        .collect();
    out.sort_unstable();
    Ok(out)
}
