use std::collections::BTreeMap;

use proptest::prelude::*;
use treeclust_core::tree::unvectorize;
use treeclust_core::{DMatrix, SupportTreeSpec, Tree};

fn spec() -> impl Strategy<Value = SupportTreeSpec> {
    (2usize..=4, 1usize..=4, any::<bool>()).prop_map(|(m, d, t)| SupportTreeSpec::new(m, d, t).unwrap())
}

/// A random connected tree: every branch chosen from the free slots of the
/// branches already present.
fn tree_in(spec: SupportTreeSpec, picks: Vec<u32>, q: usize) -> Tree {
    let mut present: Vec<usize> = vec![spec.roots().start];
    for pick in picks {
        let mut free: Vec<usize> = present
            .iter()
            .flat_map(|&b| spec.children(b))
            .chain(spec.roots())
            .filter(|c| !present.contains(c))
            .collect();
        free.sort_unstable();
        free.dedup();
        if free.is_empty() {
            break;
        }
        present.push(free[pick as usize % free.len()]);
    }
    let branches: BTreeMap<usize, Vec<f64>> = present
        .iter()
        .map(|&b| (b, (0..q).map(|j| (b * 10 + j + 1) as f64 / 7.0).collect()))
        .collect();
    Tree::new("t", None, branches).unwrap()
}

proptest! {
    #[test]
    fn parent_inverts_child(spec in spec()) {
        for i in 1..=spec.branch_count() {
            for (j, c) in spec.children(i).enumerate() {
                prop_assert_eq!(spec.child(i, j + 1), Some(c));
                prop_assert_eq!(spec.parent(c).unwrap(), Some(i));
            }
        }
    }

    #[test]
    fn every_branch_enumerated_once(spec in spec()) {
        let mut seen = vec![0usize; spec.branch_count() + 1];
        for r in spec.roots() {
            seen[r] += 1;
            prop_assert_eq!(spec.parent(r).unwrap(), None);
        }
        for i in 1..=spec.branch_count() {
            for c in spec.children(i) {
                seen[c] += 1;
            }
        }
        prop_assert!(seen[1..].iter().all(|&s| s == 1), "{:?}", seen);
        prop_assert!(!spec.contains(0) && !spec.contains(spec.branch_count() + 1));
    }

    #[test]
    fn level_grows_by_one_per_child(spec in spec()) {
        for i in 1..=spec.branch_count() {
            for c in spec.children(i) {
                prop_assert_eq!(spec.level(c).unwrap(), spec.level(i).unwrap() + 1);
            }
        }
    }

    #[test]
    fn vectorize_roundtrip(p in 1usize..12, q in 1usize..5, seed in any::<u64>()) {
        let m = DMatrix::from_fn(p, q, |i, j| ((seed.wrapping_mul(31).wrapping_add((i * q + j) as u64)) % 97) as f64 / 3.0);
        let ta = treeclust_core::TaMatrix::from_entries(m.clone());
        let v = ta.vectorize();
        prop_assert_eq!(v.len(), p * q);
        prop_assert_eq!(v[p * (q - 1)], m[(0, q - 1)]);
        let back = unvectorize(v.as_slice(), p, q).unwrap();
        prop_assert_eq!(back.entries(), &m);
    }

    #[test]
    fn ta_matrix_zero_pattern_matches_branches(spec in spec(), picks in prop::collection::vec(any::<u32>(), 0..20), q in 1usize..4) {
        let tree = tree_in(spec, picks, q);
        let ta = tree.to_ta_matrix(&spec).unwrap();
        prop_assert!(ta.is_positive_uniform(0.0));
        for i in 1..=spec.branch_count() {
            let row = ta.entries().row(i - 1);
            match tree.attributes(i) {
                Some(a) => prop_assert_eq!(row.iter().copied().collect::<Vec<_>>(), a.to_vec()),
                None => prop_assert!(row.iter().all(|&v| v == 0.0)),
            }
        }
    }
}
