//! Least-squares NMF by multiplicative updates, and community extraction
//! from the coefficient matrix.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::revision::RevisedMatrix;
use crate::seed;

/// Denominator floor for the multiplicative updates.
pub const DENOMINATOR_GUARD: f64 = 1e-12;
pub const DEFAULT_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct NmfOptions {
    pub iterations: usize,
    /// Stop once the relative objective decrease drops below this value.
    pub tolerance: Option<f64>,
}

impl Default for NmfOptions {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            tolerance: None,
        }
    }
}

/// `X ≈ W H` with `W` n×k and `H` k×m.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub w: DMatrix<f64>,
    pub h: DMatrix<f64>,
    /// `‖X − WH‖²_F` after each iteration.
    pub objective_trace: Vec<f64>,
}

impl Factorization {
    pub fn final_objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(f64::NAN)
    }
}

pub fn nmf(x: &RevisedMatrix, k: usize, options: &NmfOptions, seed: u64) -> Result<Factorization> {
    factorize(x.matrix(), k, options, seed)
}

/// Factorizes any entrywise-nonnegative matrix.
pub fn factorize(
    x: &DMatrix<f64>,
    k: usize,
    options: &NmfOptions,
    seed: u64,
) -> Result<Factorization> {
    let (n, m) = x.shape();
    if k == 0 || k > n.min(m) {
        return Err(Error::Dimension(format!("rank {k} for a {n}x{m} matrix")));
    }
    if options.iterations == 0 {
        return Err(Error::InvalidParameter(
            "NMF needs at least one iteration".into(),
        ));
    }
    if let Some(bad) = x.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "NMF input has entry {bad}"
        )));
    }

    let mut rng = seed::rng(seed);
    // 1 - U[0,1) lies in (0, 1].
    let mut w = DMatrix::from_fn(n, k, |_, _| 1.0 - rng.gen::<f64>());
    let mut h = DMatrix::from_fn(k, m, |_, _| 1.0 - rng.gen::<f64>());
    let mut trace: Vec<f64> = Vec::with_capacity(options.iterations);

    for _ in 0..options.iterations {
        let numer = x * h.transpose();
        let denom = &w * (&h * h.transpose());
        multiplicative_step(&mut w, &numer, &denom);

        let numer = w.transpose() * x;
        let denom = (w.transpose() * &w) * &h;
        multiplicative_step(&mut h, &numer, &denom);

        let objective = (x - &w * &h).norm_squared();
        let converged = match (options.tolerance, trace.last()) {
            (Some(tol), Some(&prev)) => prev - objective <= tol * prev.max(f64::MIN_POSITIVE),
            _ => false,
        };
        trace.push(objective);
        if converged {
            break;
        }
    }

    Ok(Factorization {
        w,
        h,
        objective_trace: trace,
    })
}

fn multiplicative_step(target: &mut DMatrix<f64>, numer: &DMatrix<f64>, denom: &DMatrix<f64>) {
    for ((t, &num), &den) in target.iter_mut().zip(numer.iter()).zip(denom.iter()) {
        *t *= num / den.max(DENOMINATOR_GUARD);
    }
}

/// Column-wise argmax of `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HAssignment {
    pub partition: Partition,
    /// Columns whose entries are all zero; they fall back to community 0.
    pub degenerate_columns: Vec<usize>,
}

/// Node `j` joins the row holding the largest entry of column `j`; ties go
/// to the lowest row.
pub fn assign_from_h(h: &DMatrix<f64>) -> HAssignment {
    let mut assign = Vec::with_capacity(h.ncols());
    let mut degenerate = Vec::new();
    for (j, column) in h.column_iter().enumerate() {
        let mut best = 0;
        for (row, &value) in column.iter().enumerate() {
            if value > column[best] {
                best = row;
            }
        }
        if column.iter().all(|&v| v == 0.0) {
            degenerate.push(j);
        }
        assign.push(best);
    }
    if !degenerate.is_empty() {
        log::warn!(
            "{} all-zero column(s) in H assigned to community 0 (first: node {})",
            degenerate.len(),
            degenerate[0] + 1
        );
    }
    HAssignment {
        partition: Partition::new(assign),
        degenerate_columns: degenerate,
    }
}

/// NMF followed by [`assign_from_h`].
pub fn nmf_communities(
    x: &RevisedMatrix,
    k: usize,
    options: &NmfOptions,
    seed: u64,
) -> Result<(Partition, Factorization)> {
    let f = nmf(x, k, options, seed)?;
    let assigned = assign_from_h(&f.h);
    Ok((assigned.partition, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blocks() -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |i, j| if i / 2 == j / 2 { 1.0 } else { 0.0 })
    }

    #[test]
    fn argmax_and_ties() {
        let h = DMatrix::from_row_slice(2, 3, &[0.1, 0.5, 0.0, 0.9, 0.5, 0.0]);
        let a = assign_from_h(&h);
        assert_eq!(a.partition.as_slice(), &[1, 0, 0]);
        assert_eq!(a.degenerate_columns, vec![2]);
    }

    #[test]
    fn recovers_two_blocks() {
        let f = factorize(&two_blocks(), 2, &NmfOptions::default(), 11).unwrap();
        assert!(
            f.final_objective() < 1e-4,
            "objective {}",
            f.final_objective()
        );
        let p = assign_from_h(&f.h).partition;
        assert_eq!(p.as_slice()[0], p.as_slice()[1]);
        assert_eq!(p.as_slice()[2], p.as_slice()[3]);
        assert_ne!(p.as_slice()[0], p.as_slice()[2]);
    }

    #[test]
    fn more_iterations_never_worse() {
        let x = DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64);
        let one = factorize(
            &x,
            3,
            &NmfOptions {
                iterations: 1,
                tolerance: None,
            },
            2,
        )
        .unwrap();
        let many = factorize(&x, 3, &NmfOptions::default(), 2).unwrap();
        assert!(many.final_objective() <= one.final_objective());
        assert_eq!(many.objective_trace[0], one.objective_trace[0]);
    }

    #[test]
    fn rank_larger_than_matrix_is_rejected() {
        let err = factorize(&two_blocks(), 5, &NmfOptions::default(), 0).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
        assert!(factorize(&two_blocks(), 0, &NmfOptions::default(), 0).is_err());
    }

    #[test]
    fn negative_input_is_rejected() {
        let mut x = two_blocks();
        x[(0, 3)] = -1.0;
        assert!(factorize(&x, 2, &NmfOptions::default(), 0).is_err());
    }

    #[test]
    fn tolerance_stops_early() {
        let opts = NmfOptions {
            iterations: 1000,
            tolerance: Some(1e-6),
        };
        let f = factorize(&two_blocks(), 2, &opts, 5).unwrap();
        assert!(f.objective_trace.len() < 1000);
    }

    #[test]
    fn zero_rows_stay_finite() {
        let mut x = two_blocks();
        for j in 0..4 {
            x[(3, j)] = 0.0;
            x[(j, 3)] = 0.0;
        }
        let f = factorize(&x, 2, &NmfOptions::default(), 9).unwrap();
        assert!(f
            .w
            .iter()
            .chain(f.h.iter())
            .all(|v| v.is_finite() && *v >= 0.0));
    }
}
