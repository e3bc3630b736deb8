use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use super::affinity::AffinityGraph;
use super::kmeans::kmeans_euclid;
use super::{canonical_labels, ClusterMethod, ClusterResult};
use crate::error::{Error, Result};

const EMBEDDING_RESTARTS: usize = 10;

/// Normalized cut `Σ_c cut(A_c, V∖A_c) / assoc(A_c, V)` of a labeling.
pub fn ncut_value(weights: &DMatrix<f64>, assignments: &[usize], clusters: usize) -> f64 {
    let mut cut = vec![0.0; clusters];
    let mut assoc = vec![0.0; clusters];
    for (i, &a) in assignments.iter().enumerate() {
        for (j, &b) in assignments.iter().enumerate() {
            let w = weights[(i, j)];
            assoc[a] += w;
            if a != b {
                cut[a] += w;
            }
        }
    }
    cut.iter()
        .zip(&assoc)
        .filter(|(_, &s)| s > 0.0)
        .map(|(c, s)| c / s)
        .sum()
}

/// Spectral normalized-cut clustering.
///
/// Solves `(D − W)x = λDx` through the symmetric form
/// `D^{-1/2}(D − W)D^{-1/2}`. Two clusters come from the best threshold
/// sweep over the second eigenvector (lowest threshold on ties); more
/// clusters come from seeded K-means on the rows of the leading `k_c`
/// eigenvectors.
pub fn ncut_cluster(graph: &AffinityGraph, k_c: usize, seed: u64) -> Result<ClusterResult> {
    let n = graph.n();
    if k_c < 2 || k_c > n {
        return Err(Error::InvalidClusterCount { clusters: k_c, points: n });
    }
    let w = graph.weights();
    let degree: Vec<f64> = w.row_iter().map(|r| r.sum()).collect();
    if let Some(node) = degree.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree(node));
    }
    let inv_sqrt: Vec<f64> = degree.iter().map(|&d| 1.0 / libm::sqrt(d)).collect();
    let laplacian = DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - w[(i, j)] * inv_sqrt[i] * inv_sqrt[j]
    });
    let eigen = SymmetricEigen::new(laplacian);
    if eigen.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .total_cmp(&eigen.eigenvalues[b])
            .then(a.cmp(&b))
    });
    // generalized eigenvectors x = D^{-1/2} y, sign fixed by the largest entry
    let vector = |rank: usize| -> Vec<f64> {
        let y = eigen.eigenvectors.column(order[rank]);
        let mut x: Vec<f64> = y.iter().zip(&inv_sqrt).map(|(v, s)| v * s).collect();
        let pivot = x
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc })
            .0;
        if x[pivot] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    };

    let raw = if k_c == 2 {
        sweep_split(w, &degree, &vector(1))
    } else {
        let columns: Vec<Vec<f64>> = (0..k_c).map(vector).collect();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        kmeans_euclid(&rows, k_c, EMBEDDING_RESTARTS, seed).assignments
    };
    let assignments = canonical_labels(&raw);
    let clusters = assignments.iter().max().map_or(0, |m| m + 1);
    Ok(ClusterResult {
        value: ncut_value(w, &assignments, clusters),
        assignments,
        clusters: k_c,
        method: ClusterMethod::Ncut,
        metric: graph.metric(),
        seed,
    })
}

/// Best bipartition among prefixes of the points sorted by `x`.
fn sweep_split(w: &DMatrix<f64>, degree: &[f64], x: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let total: f64 = degree.iter().sum();
    let mut in_a = vec![false; n];
    let mut cut = 0.0;
    let mut assoc_a = 0.0;
    let mut best = (f64::INFINITY, 1);
    for (s, &v) in sorted.iter().enumerate().take(n - 1) {
        // move v from B to A
        for j in 0..n {
            if j != v {
                if in_a[j] {
                    cut -= w[(v, j)];
                } else {
                    cut += w[(v, j)];
                }
            }
        }
        in_a[v] = true;
        assoc_a += degree[v];
        let value = cut / assoc_a + cut / (total - assoc_a);
        if value < best.0 {
            best = (value, s + 1);
        }
    }
    let mut labels = vec![1; n];
    for &v in &sorted[..best.1] {
        labels[v] = 0;
    }
    labels
}
