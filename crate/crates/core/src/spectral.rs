//! Spectral clustering on a normalized affinity matrix.
//!
//! `L = D^e B D^e` with `D_ii = Σ_j B_ij` (the usual choice is `e = -1/2`),
//! the `k` eigenvectors of `L` with the algebraically largest eigenvalues,
//! row normalization, then k-means on the rows.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansOptions};
use crate::partition::Partition;
use crate::revision::RevisedMatrix;

pub const DEFAULT_EXPONENT: f64 = -0.5;

pub fn normalized_affinity(b: &DMatrix<f64>, exponent: f64) -> Result<DMatrix<f64>> {
    if !b.is_square() {
        return Err(Error::Dimension(format!(
            "affinity is {}x{}",
            b.nrows(),
            b.ncols()
        )));
    }
    let scale: Vec<f64> = b
        .row_iter()
        .enumerate()
        .map(|(row, r)| {
            let degree = r.sum();
            if degree > 0.0 && degree.is_finite() {
                Ok(degree.powf(exponent))
            } else {
                Err(Error::DegenerateRow {
                    row: row + 1,
                    degree,
                })
            }
        })
        .collect::<Result<_>>()?;
    let n = b.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            l[(i, j)] = scale[i] * b[(i, j)] * scale[j];
        }
    }
    // Enforce exact symmetry; D^e B D^e is symmetric up to rounding only when B is.
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (l[(i, j)] + l[(j, i)]);
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    Ok(l)
}

/// Leading eigenpairs, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// n×k, one unit eigenvector per column.
    pub vectors: DMatrix<f64>,
}

/// Relative residual bound `‖Lx − λx‖ ≤ RESIDUAL_BOUND · ‖L‖_F`.
pub const RESIDUAL_BOUND: f64 = 1e-8;

pub fn top_k_eigenvectors(l: &DMatrix<f64>, k: usize) -> Result<Eigenpairs> {
    let n = l.nrows();
    if !l.is_square() || k == 0 || k > n {
        return Err(Error::Dimension(format!(
            "{k} eigenvectors of a {}x{} matrix",
            l.nrows(),
            l.ncols()
        )));
    }
    let max_iterations = (30 * n).max(1000);
    let eigen = SymmetricEigen::try_new(l.clone(), f64::EPSILON, max_iterations).ok_or(
        Error::NonConvergence {
            n,
            iterations: max_iterations,
        },
    )?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));

    let norm = l.norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(k);
    let mut vectors = DMatrix::zeros(n, k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        let lambda = eigen.eigenvalues[idx];
        let mut v: DVector<f64> = eigen.eigenvectors.column(idx).into_owned();
        v /= v.norm();
        fix_sign(&mut v);
        let residual = (l * &v - &v * lambda).norm();
        if residual > RESIDUAL_BOUND * norm {
            return Err(Error::Residual {
                residual,
                bound: RESIDUAL_BOUND * norm,
            });
        }
        values.push(lambda);
        vectors.set_column(col, &v);
    }
    Ok(Eigenpairs { values, vectors })
}

/// Makes the first non-negligible component positive.
fn fix_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10 * scale) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Scales each row to unit L2 norm. Returns the indices of zero rows, which are left at zero.
pub fn normalize_rows(x: &mut DMatrix<f64>) -> Vec<usize> {
    let mut zero_rows = Vec::new();
    for (i, mut row) in x.row_iter_mut().enumerate() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        } else {
            zero_rows.push(i);
        }
    }
    zero_rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOptions {
    pub exponent: f64,
    pub kmeans: KMeansOptions,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            exponent: DEFAULT_EXPONENT,
            kmeans: KMeansOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub partition: Partition,
    pub eigenvalues: Vec<f64>,
    /// Row-normalized embedding fed to k-means.
    pub embedding: DMatrix<f64>,
}

pub fn spectral_cluster(
    b: &RevisedMatrix,
    k: usize,
    options: &SpectralOptions,
    seed: u64,
) -> Result<SpectralResult> {
    spectral_cluster_matrix(b.matrix(), k, options, seed)
}

pub fn spectral_cluster_matrix(
    b: &DMatrix<f64>,
    k: usize,
    options: &SpectralOptions,
    seed: u64,
) -> Result<SpectralResult> {
    let l = normalized_affinity(b, options.exponent)?;
    let pairs = top_k_eigenvectors(&l, k)?;
    let mut embedding = pairs.vectors;
    let zero_rows = normalize_rows(&mut embedding);
    if !zero_rows.is_empty() {
        log::warn!(
            "{} zero embedding row(s) kept at the origin",
            zero_rows.len()
        );
    }
    let clusters = kmeans(&embedding, k, &options.kmeans, seed)?;
    Ok(SpectralResult {
        partition: clusters.partition,
        eigenvalues: pairs.values,
        embedding,
    })
}
