use std::fmt;

use thiserror::Error;

use crate::constraints::Conflict;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or settings supplied by the caller.
    Usage,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },

    #[error("duplicate label row for node {node}")]
    DuplicateLabel { node: usize },

    #[error("node {node} is outside the node range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible probability: {0}")]
    InfeasibleProbability(String),

    #[error("graph generation failed: {0}")]
    GenerationFailure(GenerationDiagnostics),

    #[error("contradictory constraints: {}", format_conflicts(.0))]
    Contradiction(Vec<Conflict>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("row {row} has degree {degree}, which cannot be normalized")]
    DegenerateRow { row: usize, degree: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (n = {n})")]
    NonConvergence { n: usize, iterations: usize },

    #[error("eigenpair residual {residual:e} exceeds bound {bound:e}")]
    Residual { residual: f64, bound: f64 },

    #[error("partition does not cover node {node}")]
    Coverage { node: usize },

    #[error("too many failed trials: {failed} of {trials}")]
    TrialFailures { failed: usize, trials: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NonConvergence { .. } | Error::Residual { .. } | Error::DegenerateRow { .. } => {
                ErrorKind::Numeric
            }
            Error::InvalidParameter(_) => ErrorKind::Usage,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

fn format_conflicts(conflicts: &[Conflict]) -> String {
    let shown: Vec<String> = conflicts.iter().take(5).map(|c| c.to_string()).collect();
    let mut out = shown.join("; ");
    if conflicts.len() > 5 {
        out.push_str(&format!(" (+{} more)", conflicts.len() - 5));
    }
    out
}

/// State of the LFR wiring when rewiring gives up.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationDiagnostics {
    pub stage: &'static str,
    pub sweeps: usize,
    pub bad_edges: usize,
    pub total_edges: usize,
}

impl fmt::Display for GenerationDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} wiring left {} of {} edges invalid after {} sweeps",
            self.stage, self.bad_edges, self.total_edges, self.sweeps
        )
    }
}
