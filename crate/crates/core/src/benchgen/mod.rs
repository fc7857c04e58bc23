//! Benchmark graphs with planted communities.

mod gn;
mod lfr;
mod powerlaw;

pub use gn::{generate_gn, GnParams};
pub use lfr::{generate_lfr, LfrParams};
pub use powerlaw::DiscretePowerLaw;

use crate::graph::{Graph, GroundTruth};

/// Per-node fraction of neighbors outside the node's own community.
/// Isolated or unlabeled nodes are skipped.
pub fn mixing_fractions(g: &Graph, gt: &GroundTruth) -> Vec<f64> {
    let n = g.node_count();
    let mut external = vec![0usize; n];
    let mut degree = vec![0usize; n];
    for (u, v) in g.edges() {
        degree[u] += 1;
        degree[v] += 1;
        if gt.label(u) != gt.label(v) {
            external[u] += 1;
            external[v] += 1;
        }
    }
    (0..n)
        .filter(|&i| degree[i] > 0 && gt.label(i).is_some())
        .map(|i| external[i] as f64 / degree[i] as f64)
        .collect()
}

/// Mean of [`mixing_fractions`], or 0 for a graph without edges.
pub fn mean_mixing(g: &Graph, gt: &GroundTruth) -> f64 {
    let fractions = mixing_fractions(g, gt);
    if fractions.is_empty() {
        0.0
    } else {
        fractions.iter().sum::<f64>() / fractions.len() as f64
    }
}
