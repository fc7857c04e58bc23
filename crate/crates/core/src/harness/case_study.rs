use std::fmt;

use crate::constraints::{pair_count, sample_constraints, ConstraintSet};
use crate::error::Result;
use crate::graph::{Graph, GroundTruth};
use crate::metrics::{misclustered, nmi_against_truth};
use crate::nmf::{nmf_communities, NmfOptions};
use crate::partition::Partition;
use crate::revision::{revise, DEFAULT_ALPHA};
use crate::seed;

/// Conference count of the football network.
pub const CASE_STUDY_K: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutcome {
    /// Pairs written into the matrix.
    pub constraints: ConstraintSet,
    pub partition: Partition,
    /// 1-based ids of labeled nodes outside their matched community.
    pub misclustered: Vec<usize>,
    pub nmi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudyRow {
    pub fraction: f64,
    /// Pairs of labeled nodes, `m(m−1)/2`.
    pub labeled_pairs: usize,
    pub plain: DetectionOutcome,
    pub enhanced: DetectionOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudyReport {
    pub k: usize,
    pub rows: Vec<CaseStudyRow>,
}

/// NMF on the sampled constraints with and without closure, one sample per
/// fraction. Both arms of a fraction share the sample and the NMF seed.
pub fn run_case_study(
    graph: &Graph,
    truth: &GroundTruth,
    fractions: &[f64],
    seed: u64,
) -> Result<CaseStudyReport> {
    truth.check_range(graph.node_count())?;
    let n = graph.node_count();
    let a = graph.adjacency();
    let opts = NmfOptions::default();
    let mut rows = Vec::with_capacity(fractions.len());
    for (fi, &fraction) in fractions.iter().enumerate() {
        let stream = seed::derive(seed, fi as u64);
        let sample =
            sample_constraints(truth, n, fraction, &mut seed::rng(seed::derive(stream, 0)))?;
        let closed = sample.enhance()?.0;
        let nmf_seed = seed::derive(stream, 1);
        let detect = |s: ConstraintSet| -> Result<DetectionOutcome> {
            let b = revise(&a, &s, DEFAULT_ALPHA)?;
            let (partition, _) = nmf_communities(&b, CASE_STUDY_K, &opts, nmf_seed)?;
            Ok(DetectionOutcome {
                misclustered: misclustered(&partition, truth)?,
                nmi: nmi_against_truth(&partition, truth)?,
                constraints: s,
                partition,
            })
        };
        rows.push(CaseStudyRow {
            fraction,
            labeled_pairs: pair_count(truth.labeled_count()),
            plain: detect(sample)?,
            enhanced: detect(closed)?,
        });
    }
    Ok(CaseStudyReport {
        k: CASE_STUDY_K,
        rows,
    })
}

impl fmt::Display for CaseStudyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fraction\tarm\tml\tcl\tpairs\tshare\tnmi\tmisclustered")?;
        for r in &self.rows {
            for (arm, o) in [("plain", &r.plain), ("enhanced", &r.enhanced)] {
                let list: Vec<String> = o.misclustered.iter().map(usize::to_string).collect();
                writeln!(
                    f,
                    "{}\t{arm}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{}",
                    r.fraction,
                    o.constraints.ml().len(),
                    o.constraints.cl().len(),
                    o.constraints.len(),
                    o.constraints.len() as f64 / r.labeled_pairs.max(1) as f64,
                    o.nmi,
                    if list.is_empty() {
                        "-".to_string()
                    } else {
                        list.join(",")
                    }
                )?;
            }
        }
        Ok(())
    }
}
