use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, GroundTruth};
use crate::seed;

/// Planted partition with equal groups. Each intra-group pair is linked with
/// probability `z_in / (size − 1)` and each inter-group pair with
/// `z_out / (n − size)`, so a node expects `z_in` internal and `z_out`
/// external neighbors. The classic benchmark is 4 groups of 32 with
/// `z_in + z_out = 16`.
#[derive(Debug, Clone, PartialEq)]
pub struct GnParams {
    pub z_in: f64,
    pub z_out: f64,
    pub groups: usize,
    pub group_size: usize,
}

impl GnParams {
    pub fn new(z_in: f64, z_out: f64) -> Self {
        Self {
            z_in,
            z_out,
            ..Self::default()
        }
    }

    pub fn node_count(&self) -> usize {
        self.groups * self.group_size
    }

    /// `(p_in, p_out)`, validated.
    pub fn probabilities(&self) -> Result<(f64, f64)> {
        if self.groups == 0 || self.group_size == 0 {
            return Err(Error::InvalidParameter(
                "GN needs at least one non-empty group".into(),
            ));
        }
        if !(self.z_in >= 0.0 && self.z_out >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "z_in = {}, z_out = {} must be non-negative",
                self.z_in, self.z_out
            )));
        }
        let n = self.node_count();
        let p_in = ratio(self.z_in, self.group_size - 1);
        let p_out = ratio(self.z_out, n - self.group_size);
        if p_in > 1.0 {
            return Err(Error::InfeasibleProbability(format!(
                "z_in = {} exceeds the {} possible internal neighbors",
                self.z_in,
                self.group_size - 1
            )));
        }
        if p_out > 1.0 {
            return Err(Error::InfeasibleProbability(format!(
                "z_out = {} exceeds the {} possible external neighbors",
                self.z_out,
                n - self.group_size
            )));
        }
        Ok((p_in, p_out))
    }
}

fn ratio(expected: f64, possible: usize) -> f64 {
    if expected == 0.0 {
        0.0
    } else if possible == 0 {
        f64::INFINITY
    } else {
        expected / possible as f64
    }
}

impl Default for GnParams {
    fn default() -> Self {
        Self {
            z_in: 6.0,
            z_out: 10.0,
            groups: 4,
            group_size: 32,
        }
    }
}

pub fn generate_gn(p: &GnParams, seed: u64) -> Result<(Graph, GroundTruth)> {
    let (p_in, p_out) = p.probabilities()?;
    let n = p.node_count();
    let group = |i: usize| i / p.group_size;
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let prob = if group(u) == group(v) { p_in } else { p_out };
            if rng.gen::<f64>() < prob {
                edges.push((u, v));
            }
        }
    }
    let truth: Vec<usize> = (0..n).map(group).collect();
    Ok((
        Graph::from_edges(n, edges)?,
        GroundTruth::from_assignment(&truth),
    ))
}
