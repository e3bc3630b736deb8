use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Fraction of positions that agree under the best one-to-one matching of
/// predicted cluster ids to truth labels.
pub fn accuracy<T: Ord>(pred: &[usize], truth: &[T]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("label vector"));
    }
    let mut truth_ids: BTreeMap<&T, usize> = BTreeMap::new();
    for t in truth {
        let next = truth_ids.len();
        truth_ids.entry(t).or_insert(next);
    }
    let mut pred_ids: BTreeMap<usize, usize> = BTreeMap::new();
    for &p in pred {
        let next = pred_ids.len();
        pred_ids.entry(p).or_insert(next);
    }
    let mut counts = vec![vec![0usize; truth_ids.len()]; pred_ids.len()];
    for (p, t) in pred.iter().zip(truth) {
        counts[pred_ids[p]][truth_ids[t]] += 1;
    }
    let matched = best_matching(&counts);
    Ok(matched as f64 / pred.len() as f64)
}

/// Maximum total count over one-to-one row/column matchings (Hungarian method).
pub fn best_matching(counts: &[Vec<usize>]) -> usize {
    let rows = counts.len();
    let cols = counts.first().map_or(0, Vec::len);
    let size = rows.max(cols);
    if size == 0 {
        return 0;
    }
    let top = counts.iter().flatten().copied().max().unwrap_or(0) as i64;
    let cost = |i: usize, j: usize| -> i64 {
        let c = if i < rows && j < cols { counts[i][j] as i64 } else { 0 };
        top - c
    };
    // potentials formulation, 1-based with a virtual column 0
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; size + 1];
    let mut v = vec![0i64; size + 1];
    let mut owner = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=size {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=size)
        .filter(|&j| owner[j] >= 1 && owner[j] <= rows && j <= cols)
        .map(|j| counts[owner[j] - 1][j - 1])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_invariant() {
        assert_eq!(accuracy(&[0, 0, 1, 1], &["B", "B", "A", "A"]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1, 0, 1], &["A", "A", "B", "B"]).unwrap(), 0.5);
        assert_eq!(accuracy(&[3, 3, 3], &[1, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn unequal_cluster_counts() {
        // three predicted groups against two labels: one group is left unmatched
        assert_eq!(accuracy(&[0, 0, 1, 2], &["A", "A", "B", "B"]).unwrap(), 0.75);
        assert_eq!(accuracy(&[0, 0, 0, 0], &["A", "A", "B", "C"]).unwrap(), 0.5);
    }

    #[test]
    fn errors() {
        assert!(accuracy(&[0, 1], &["A"]).is_err());
        assert!(accuracy::<u8>(&[], &[]).is_err());
    }

    #[test]
    fn matching_small_tables() {
        assert_eq!(best_matching(&[vec![5, 1], vec![4, 3]]), 8);
        assert_eq!(best_matching(&[vec![1, 9, 2]]), 9);
        assert_eq!(best_matching(&[]), 0);
    }
}
