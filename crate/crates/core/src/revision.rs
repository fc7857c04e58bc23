//! Objective matrices: the adjacency matrix with must-link pairs raised to
//! `alpha` and cannot-link pairs zeroed.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::constraints::{ConstraintSet, FilterMode};
use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;

pub const DEFAULT_ALPHA: f64 = 2.0;

/// Symmetric objective matrix with entries in `{0, 1, alpha}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RevisedMatrix {
    matrix: DMatrix<f64>,
    alpha: f64,
}

impl RevisedMatrix {
    /// Wraps an arbitrary nonnegative square matrix, e.g. for tests of the detectors.
    pub fn from_matrix(matrix: DMatrix<f64>, alpha: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "objective matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, alpha })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Number of entries that differ from `a`.
    pub fn changed_entries(&self, a: &AdjacencyMatrix) -> usize {
        self.matrix
            .iter()
            .zip(a.matrix().iter())
            .filter(|(x, y)| x != y)
            .count()
    }

    /// Dense tab-separated rows.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.matrix.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format_entry(*v)).collect();
            writeln!(out, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

fn format_entry(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// `alpha` on must-link pairs, `0` on cannot-link pairs, `a` elsewhere.
pub fn revise(a: &AdjacencyMatrix, s: &ConstraintSet, alpha: f64) -> Result<RevisedMatrix> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let n = a.size();
    if s.universe() > n {
        return Err(Error::Dimension(format!(
            "constraints over {} nodes for a {n}-node matrix",
            s.universe()
        )));
    }
    let conflicts = s.check_consistency();
    if !conflicts.is_empty() {
        return Err(Error::Contradiction(conflicts));
    }
    let mut m = a.matrix().clone();
    for &(u, v) in s.ml() {
        m[(u, v)] = alpha;
        m[(v, u)] = alpha;
    }
    for &(u, v) in s.cl() {
        m[(u, v)] = 0.0;
        m[(v, u)] = 0.0;
    }
    Ok(RevisedMatrix { matrix: m, alpha })
}

/// The objective matrices compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Plain adjacency matrix.
    A,
    /// Both constraint types, as sampled.
    B1,
    /// Both constraint types after closure.
    B2,
    B1Ml,
    B1Cl,
    /// Must-link only, after transitive closure.
    B2Ml,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::A,
        Variant::B1,
        Variant::B2,
        Variant::B1Ml,
        Variant::B1Cl,
        Variant::B2Ml,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::A => "A",
            Variant::B1 => "B1",
            Variant::B2 => "B2",
            Variant::B1Ml => "B1_ML",
            Variant::B1Cl => "B1_CL",
            Variant::B2Ml => "B2_ML",
        }
    }

    /// Constraint types the variant keeps, or `None` for `A`.
    pub fn filter_mode(self) -> Option<FilterMode> {
        match self {
            Variant::A => None,
            Variant::B1 | Variant::B2 => Some(FilterMode::Both),
            Variant::B1Ml | Variant::B2Ml => Some(FilterMode::MlOnly),
            Variant::B1Cl => Some(FilterMode::ClOnly),
        }
    }

    pub fn is_enhanced(self) -> bool {
        matches!(self, Variant::B2 | Variant::B2Ml)
    }

    /// Constraints the variant writes into the matrix: `(before, after)` closure.
    pub fn constraints(self, s: &ConstraintSet) -> Result<(ConstraintSet, ConstraintSet)> {
        let before = match self.filter_mode() {
            None => ConstraintSet::new(s.universe()),
            Some(mode) => s.filter(mode),
        };
        let after = if self.is_enhanced() {
            before.enhance()?.0
        } else {
            before.clone()
        };
        Ok((before, after))
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown variant {s:?}")))
    }
}

pub fn build_variant(
    a: &AdjacencyMatrix,
    s: &ConstraintSet,
    variant: Variant,
    alpha: f64,
) -> Result<RevisedMatrix> {
    let (_, applied) = variant.constraints(s)?;
    revise(a, &applied, alpha)
}
