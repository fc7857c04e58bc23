//! Lloyd's k-means with k-means++ seeding and restarts.

use nalgebra::{DMatrix, RowDVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iterations: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub partition: Partition,
    pub centers: DMatrix<f64>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

/// Clusters the rows of `points`. Restart `r` uses seed `derive(seed, r)`;
/// the run with the lowest inertia wins, earliest on ties.
pub fn kmeans(
    points: &DMatrix<f64>,
    k: usize,
    options: &KMeansOptions,
    seed: u64,
) -> Result<KMeansResult> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::Dimension(format!("{k} clusters for {n} points")));
    }
    let mut best: Option<KMeansResult> = None;
    for restart in 0..options.restarts.max(1) {
        let mut rng = seed::rng(seed::derive(seed, restart as u64));
        let run = lloyd(points, k, options.max_iterations, &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn squared_distance(points: &DMatrix<f64>, i: usize, center: &RowDVector<f64>) -> f64 {
    points
        .row(i)
        .iter()
        .zip(center.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn plus_plus_seeding<R: Rng>(points: &DMatrix<f64>, k: usize, rng: &mut R) -> Vec<RowDVector<f64>> {
    let n = points.nrows();
    let mut centers = vec![points.row(rng.gen_range(0..n)).into_owned()];
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| squared_distance(points, i, &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        let center = points.row(pick).into_owned();
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(points, i, &center));
        }
        centers.push(center);
    }
    centers
}

fn lloyd<R: Rng>(
    points: &DMatrix<f64>,
    k: usize,
    max_iterations: usize,
    rng: &mut R,
) -> KMeansResult {
    let n = points.nrows();
    let mut centers = plus_plus_seeding(points, k, rng);
    let mut assign = vec![usize::MAX; n];

    for _ in 0..max_iterations.max(1) {
        let mut next: Vec<usize> = (0..n)
            .map(|i| {
                let mut best = 0;
                let mut best_d = squared_distance(points, i, &centers[0]);
                for (c, center) in centers.iter().enumerate().skip(1) {
                    let d = squared_distance(points, i, center);
                    if d < best_d {
                        best = c;
                        best_d = d;
                    }
                }
                best
            })
            .collect();
        repair_empty(points, &centers, &mut next, k);
        if next == assign {
            break;
        }
        assign = next;
        centers = means(points, &assign, k);
    }

    let inertia = (0..n)
        .map(|i| squared_distance(points, i, &centers[assign[i]]))
        .sum();
    let mut center_matrix = DMatrix::zeros(k, points.ncols());
    for (c, center) in centers.iter().enumerate() {
        center_matrix.set_row(c, center);
    }
    KMeansResult {
        partition: Partition::new(assign),
        centers: center_matrix,
        inertia,
    }
}

/// Gives each empty cluster the point farthest from its center within the
/// currently largest cluster.
fn repair_empty(
    points: &DMatrix<f64>,
    centers: &[RowDVector<f64>],
    assign: &mut [usize],
    k: usize,
) {
    loop {
        let mut sizes = vec![0usize; k];
        for &c in assign.iter() {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let largest = (0..k)
            .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
            .unwrap();
        if sizes[largest] <= 1 {
            return;
        }
        let mut far = usize::MAX;
        let mut far_d = f64::NEG_INFINITY;
        for (i, &c) in assign.iter().enumerate() {
            if c == largest {
                let d = squared_distance(points, i, &centers[largest]);
                if d > far_d {
                    far = i;
                    far_d = d;
                }
            }
        }
        assign[far] = empty;
    }
}

fn means(points: &DMatrix<f64>, assign: &[usize], k: usize) -> Vec<RowDVector<f64>> {
    let d = points.ncols();
    let mut sums = vec![RowDVector::zeros(d); k];
    let mut counts = vec![0usize; k];
    for (i, &c) in assign.iter().enumerate() {
        sums[c] += points.row(i);
        counts[c] += 1;
    }
    for (sum, &count) in sums.iter_mut().zip(&counts) {
        if count > 0 {
            *sum /= count as f64;
        }
    }
    sums
}
