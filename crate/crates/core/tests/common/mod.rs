//! Slow reference implementations shared by the property and acceptance
//! tests. None of them reuse library code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::DMatrix;

pub type Pairs = BTreeSet<(usize, usize)>;

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Applies `ML(a,b) ∧ ML(b,c) ⇒ ML(a,c)` and `ML(a,b) ∧ CL(b,c) ⇒ CL(a,c)`
/// over all triples until nothing changes.
pub fn naive_closure(n: usize, ml: &Pairs, cl: &Pairs) -> (Pairs, Pairs) {
    let mut ml_m = vec![vec![false; n]; n];
    let mut cl_m = vec![vec![false; n]; n];
    for &(a, b) in ml {
        ml_m[a][b] = true;
        ml_m[b][a] = true;
    }
    for &(a, b) in cl {
        cl_m[a][b] = true;
        cl_m[b][a] = true;
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if !ml_m[a][b] {
                    continue;
                }
                for c in 0..n {
                    if c != a && ml_m[b][c] && !ml_m[a][c] {
                        ml_m[a][c] = true;
                        ml_m[c][a] = true;
                        changed = true;
                    }
                    if cl_m[b][c] && !cl_m[a][c] {
                        cl_m[a][c] = true;
                        cl_m[c][a] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let collect = |m: &Vec<Vec<bool>>| -> Pairs {
        let mut out = Pairs::new();
        for (a, row) in m.iter().enumerate() {
            for (b, _) in row.iter().enumerate().skip(a + 1).filter(|(_, &x)| x) {
                out.insert(key(a, b));
            }
        }
        out
    };
    (collect(&ml_m), collect(&cl_m))
}

/// Cyclic Jacobi rotations. Returns eigenvalues in descending order with
/// matching unit eigenvectors as columns.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].total_cmp(&a[(x, x)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// `I(X;Y) / sqrt(H(X) H(Y))` computed straight from joint counts, with
/// natural logarithms; zero when either side has a single cluster.
pub fn reference_nmi(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len() as f64;
    let kx = x.iter().max().map_or(0, |m| m + 1);
    let ky = y.iter().max().map_or(0, |m| m + 1);
    let mut joint = vec![vec![0.0; ky]; kx];
    for (&a, &b) in x.iter().zip(y) {
        joint[a][b] += 1.0;
    }
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum::<f64>() / n).collect();
    let py: Vec<f64> = (0..ky)
        .map(|j| joint.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let h = |p: &[f64]| {
        -p.iter()
            .filter(|&&v| v > 0.0)
            .map(|v| v * v.ln())
            .sum::<f64>()
    };
    let (hx, hy) = (h(&px), h(&py));
    if hx == 0.0 || hy == 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for a in 0..kx {
        for b in 0..ky {
            let p = joint[a][b] / n;
            if p > 0.0 {
                mi += p * (p / (px[a] * py[b])).ln();
            }
        }
    }
    mi / (hx * hy).sqrt()
}
