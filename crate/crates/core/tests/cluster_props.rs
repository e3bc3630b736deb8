use proptest::prelude::*;
use treeclust_core::cluster::{accuracy, build_affinity, kmeans_frechet, lloyd, ncut_cluster, ncut_value, AffinityGraph, SigmaPolicy};
use treeclust_core::metaspace::dist_l1;
use treeclust_core::{DMatrix, Metric, SignatureVector};

fn points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<SignatureVector>> {
    (1usize..5).prop_flat_map(move |k| {
        prop::collection::vec(prop::collection::vec(0.0..10.0f64, k), n.clone())
            .prop_map(|v| v.into_iter().map(|c| SignatureVector::new(c).unwrap()).collect())
    })
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn arithmetic_mean(group: &[&[f64]]) -> Vec<f64> {
    let n = group.len() as f64;
    (0..group[0].len()).map(|j| group.iter().map(|x| x[j]).sum::<f64>() / n).collect()
}

proptest! {
    #[test]
    fn accuracy_matches_relabeling_oracle(pairs in prop::collection::vec((0usize..3, 0usize..3), 1..30)) {
        let (pred, truth): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let oracle = permutations(3)
            .iter()
            .map(|perm| pred.iter().zip(&truth).filter(|(p, t)| perm[**p] == **t).count())
            .max()
            .unwrap() as f64
            / pred.len() as f64;
        prop_assert_eq!(accuracy(&pred, &truth).unwrap(), oracle);
    }

    #[test]
    fn affinity_matches_double_loop(pts in points(2..12), sigma in 0.1..5.0f64) {
        let graph = build_affinity(&pts, Metric::L1, SigmaPolicy::Fixed(sigma)).unwrap();
        let n = pts.len();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j {
                    1.0
                } else {
                    let d = dist_l1(&pts[i], &pts[j]).unwrap();
                    (-d * d / (2.0 * sigma * sigma)).exp()
                };
                prop_assert!((graph.weights()[(i, j)] - expected).abs() <= 1e-15);
            }
        }
        prop_assert_eq!(graph.sigma(), sigma);
    }

    #[test]
    fn median_sigma_is_median_distance(pts in points(2..9)) {
        let graph = build_affinity(&pts, Metric::Euclid, SigmaPolicy::Median).unwrap();
        let mut d: Vec<f64> = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d.push(Metric::Euclid.distance(&pts[i], &pts[j]).unwrap());
            }
        }
        d.sort_by(f64::total_cmp);
        let m = d.len();
        let median = if m % 2 == 1 { d[m / 2] } else { 0.5 * (d[m / 2 - 1] + d[m / 2]) };
        if median > 0.0 {
            prop_assert!(!graph.sigma_fallback());
            prop_assert!((graph.sigma() - median).abs() <= 1e-12 * median);
        } else {
            prop_assert!(graph.sigma_fallback());
            prop_assert_eq!(graph.sigma(), 1.0);
        }
    }

    #[test]
    fn euclid_lloyd_inertia_is_monotone(pts in points(3..25), k in 1usize..4) {
        prop_assume!(k <= pts.len());
        let slices: Vec<&[f64]> = pts.iter().map(|p| p.coords()).collect();
        let init: Vec<Vec<f64>> = slices[..k].iter().map(|s| s.to_vec()).collect();
        let run = lloyd(&slices, init, euclid, arithmetic_mean, 100);
        for pair in run.inertia_trace.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12) + 1e-12, "{:?}", run.inertia_trace);
        }
    }

    #[test]
    fn ncut_two_way_is_exhaustive_optimum_on_clear_blobs(offsets in prop::collection::vec((0.0..0.05f64, 0.0..0.05f64), 8), split in 2usize..7) {
        let pts: Vec<SignatureVector> = offsets
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let base = if i < split { 1.0 } else { 6.0 };
                SignatureVector::new(vec![base + a, base + b]).unwrap()
            })
            .collect();
        let graph = build_affinity(&pts, Metric::L1, SigmaPolicy::Median).unwrap();
        let result = ncut_cluster(&graph, 2, 0).unwrap();
        let best = (1u32..1 << 7)
            .map(|mask| {
                let labels: Vec<usize> = (0..8).map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize }).collect();
                ncut_value(graph.weights(), &labels, 2)
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!((result.value - best).abs() <= 1e-12);
        let planted: Vec<usize> = (0..8).map(|i| usize::from(i >= split)).collect();
        prop_assert_eq!(result.assignments, planted);
    }

    #[test]
    fn kmeans_labels_are_canonical_and_deterministic(pts in points(4..15), seed in any::<u64>()) {
        let a = kmeans_frechet(&pts, 2, Metric::L1, 3, seed).unwrap();
        let b = kmeans_frechet(&pts, 2, Metric::L1, 3, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.assignments[0], 0);
        prop_assert!(a.assignments.iter().all(|&c| c < 2));
    }
}

#[test]
fn zero_degree_node_is_rejected() {
    let mut w = DMatrix::identity(3, 3);
    w[(0, 0)] = 0.0;
    w[(1, 2)] = 0.5;
    w[(2, 1)] = 0.5;
    let graph = AffinityGraph::from_weights(w).unwrap();
    assert_eq!(ncut_cluster(&graph, 2, 0).unwrap_err(), treeclust_core::Error::ZeroDegree(0));
}
