use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use super::{canonical_labels, ClusterMethod, ClusterResult};
use crate::error::{Error, Result};
use crate::metaspace::{frechet_mean, Metric, SignatureVector};
use crate::seed;

pub const MAX_LLOYD_ITERS: usize = 100;

/// One Lloyd run.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydRun {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Σ d(x, centroid(x))² after every assignment step.
    pub inertia_trace: Vec<f64>,
}

impl LloydRun {
    pub fn inertia(&self) -> f64 {
        self.inertia_trace.last().copied().unwrap_or(0.0)
    }
}

/// Lloyd iterations from the given centroids.
///
/// Points go to the nearest centroid, ties to the lowest index. A cluster
/// left empty is re-seeded at the point farthest from its own centroid.
/// Stops when the assignment repeats or after `max_iters` assignment steps.
pub fn lloyd<D, M>(points: &[&[f64]], mut centroids: Vec<Vec<f64>>, distance: D, mean: M, max_iters: usize) -> LloydRun
where
    D: Fn(&[f64], &[f64]) -> f64,
    M: Fn(&[&[f64]]) -> Vec<f64>,
{
    let k = centroids.len();
    let mut assignments = vec![usize::MAX; points.len()];
    let mut trace = Vec::new();
    for iter in 0..max_iters {
        let mut inertia = 0.0;
        let next: Vec<usize> = points
            .iter()
            .map(|x| {
                let (best, d) = nearest(x, &centroids, &distance);
                inertia += d * d;
                best
            })
            .collect();
        trace.push(inertia);
        if next == assignments || iter + 1 == max_iters {
            assignments = next;
            break;
        }
        assignments = next;

        let mut members: Vec<Vec<&[f64]>> = vec![Vec::new(); k];
        for (x, &c) in points.iter().zip(&assignments) {
            members[c].push(x);
        }
        for (c, group) in members.iter().enumerate() {
            if !group.is_empty() {
                centroids[c] = mean(group);
            }
        }
        let mut taken = vec![false; points.len()];
        for c in (0..k).filter(|&c| members[c].is_empty()) {
            let far = points
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken[*i])
                .map(|(i, x)| (i, distance(x, &centroids[assignments[i]])))
                .fold(None::<(usize, f64)>, |acc, (i, d)| match acc {
                    Some((_, best)) if d <= best => acc,
                    _ => Some((i, d)),
                });
            if let Some((i, _)) = far {
                taken[i] = true;
                centroids[c] = points[i].to_vec();
            }
        }
    }
    LloydRun {
        assignments,
        centroids,
        inertia_trace: trace,
    }
}

fn nearest<D: Fn(&[f64], &[f64]) -> f64>(x: &[f64], centroids: &[Vec<f64>], distance: &D) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = distance(x, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Seeded K-means: centroids start at `k_c` distinct data points, points are
/// assigned with `metric`, and centroids move to the Fréchet mean of their
/// members. Returns the restart with the smallest inertia.
pub fn kmeans_frechet(
    points: &[SignatureVector],
    k_c: usize,
    metric: Metric,
    restarts: usize,
    seed: u64,
) -> Result<ClusterResult> {
    let n = points.len();
    if k_c == 0 || k_c > n {
        return Err(Error::InvalidClusterCount { clusters: k_c, points: n });
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().find(|h| h.len() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: bad.len(),
        });
    }
    let slices: Vec<&[f64]> = points.iter().map(|h| h.coords()).collect();
    let mean = |group: &[&[f64]]| -> Vec<f64> {
        let members: Vec<SignatureVector> = group
            .iter()
            .map(|x| SignatureVector::from_raw(x.to_vec()))
            .collect();
        frechet_mean(&members).map_or_else(|_| vec![0.0; dim], SignatureVector::into_inner)
    };
    let distance = |a: &[f64], b: &[f64]| metric.eval(a, b);

    let mut best: Option<LloydRun> = None;
    for r in 0..restarts.max(1) {
        let mut rng = seed::rng(seed::derive(seed, r as u64));
        let init = index::sample(&mut rng, n, k_c)
            .iter()
            .map(|i| slices[i].to_vec())
            .collect();
        let run = lloyd(&slices, init, distance, mean, MAX_LLOYD_ITERS);
        if best.as_ref().is_none_or(|b| run.inertia() < b.inertia()) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    Ok(ClusterResult {
        assignments: canonical_labels(&best.assignments),
        clusters: k_c,
        method: ClusterMethod::Kmeans,
        metric: Some(metric),
        value: best.inertia(),
        seed,
    })
}

/// Euclidean K-means on arbitrary real vectors (used for spectral embeddings).
pub(crate) fn kmeans_euclid(rows: &[Vec<f64>], k: usize, restarts: usize, seed: u64) -> LloydRun {
    let slices: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let dim = rows.first().map_or(0, Vec::len);
    let mean = |group: &[&[f64]]| -> Vec<f64> {
        let mut m = vec![0.0; dim];
        for x in group {
            for (a, b) in m.iter_mut().zip(x.iter()) {
                *a += b;
            }
        }
        let len = group.len() as f64;
        m.iter_mut().for_each(|a| *a /= len);
        m
    };
    let distance = |a: &[f64], b: &[f64]| Metric::Euclid.eval(a, b);
    let mut best: Option<LloydRun> = None;
    for r in 0..restarts.max(1) {
        let mut rng = seed::rng(seed::derive(seed, r as u64));
        let init = index::sample(&mut rng, rows.len(), k)
            .iter()
            .map(|i| rows[i].clone())
            .collect();
        let run = lloyd(&slices, init, distance, mean, MAX_LLOYD_ITERS);
        if best.as_ref().is_none_or(|b| run.inertia() < b.inertia()) {
            best = Some(run);
        }
    }
    best.expect("at least one restart")
}
