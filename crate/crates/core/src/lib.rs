//! Community detection under must-link / cannot-link supervision.
//!
//! Pairwise constraints are closed under two inference rules, written into
//! the adjacency matrix, and the revised matrix is handed to an NMF or a
//! spectral detector. The crate also ships planted-partition and LFR
//! benchmark generators, NMI scoring, and an experiment harness.

pub mod benchgen;
pub mod constraints;
mod dsu;
pub mod error;
pub mod graph;
pub mod harness;
pub mod kmeans;
pub mod metrics;
pub mod nmf;
pub mod partition;
pub mod revision;
pub mod seed;
pub mod spectral;

pub use constraints::{
    sample_constraints, ClosureReport, Conflict, ConstraintKind, ConstraintSet, FilterMode,
};
pub use error::{Error, ErrorKind, Result};
pub use graph::{AdjacencyMatrix, Graph, GroundTruth};
pub use metrics::{misclustered, nmi, nmi_against_truth};
pub use partition::Partition;
pub use revision::{build_variant, revise, RevisedMatrix, Variant};
