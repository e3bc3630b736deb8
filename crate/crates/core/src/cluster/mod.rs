//! Clustering of signature vectors and accuracy scoring.

mod accuracy;
mod affinity;
mod kmeans;
mod ncut;

pub use accuracy::{accuracy, best_matching};
pub use affinity::{build_affinity, AffinityGraph, SigmaPolicy};
pub use kmeans::{kmeans_frechet, lloyd, LloydRun, MAX_LLOYD_ITERS};
pub use ncut::{ncut_cluster, ncut_value};

use alloc::vec;
use alloc::vec::Vec;

use crate::metaspace::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClusterMethod {
    Ncut,
    Kmeans,
}

impl ClusterMethod {
    pub fn name(self) -> &'static str {
        match self {
            ClusterMethod::Ncut => "ncut",
            ClusterMethod::Kmeans => "kmeans",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ncut" => Some(ClusterMethod::Ncut),
            "kmeans" => Some(ClusterMethod::Kmeans),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Cluster id per point, numbered by first appearance.
    pub assignments: Vec<usize>,
    pub clusters: usize,
    pub method: ClusterMethod,
    pub metric: Option<Metric>,
    /// Inertia for K-means, normalized-cut value for NCut.
    pub value: f64,
    pub seed: u64,
}

/// Renumbers cluster ids in order of first appearance.
pub(crate) fn canonical_labels(raw: &[usize]) -> Vec<usize> {
    let top = raw.iter().copied().max().map_or(0, |m| m + 1);
    let mut map = vec![usize::MAX; top];
    let mut next = 0;
    raw.iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabels_by_first_appearance() {
        assert_eq!(canonical_labels(&[2, 2, 0, 1, 0]), vec![0, 0, 1, 2, 1]);
        assert_eq!(canonical_labels(&[]), Vec::<usize>::new());
    }
}
