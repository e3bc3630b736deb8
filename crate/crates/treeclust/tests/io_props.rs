use std::collections::BTreeMap;

use proptest::prelude::*;
use treeclust::forest_io::{format_forest, parse_forest, read_labels_csv, read_matrix_csv, write_labels_csv, write_matrix_csv, ForestFile};
use treeclust_core::{DMatrix, SupportTreeSpec, Tree};

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        1e-300..1e-3f64,
        0.001..1000.0f64,
        1e3..1e300f64,
    ]
}

fn forest() -> impl Strategy<Value = ForestFile> {
    (2usize..4, 1usize..4, any::<bool>(), 1usize..4).prop_flat_map(|(m, d, trunk, q)| {
        let spec = SupportTreeSpec::new(m, d, trunk).unwrap();
        let tree = (
            prop::collection::vec(any::<prop::sample::Index>(), 0..12),
            prop::collection::vec(value(), q * 40),
            prop::option::of("[A-Za-z][A-Za-z0-9_]{0,5}"),
        );
        prop::collection::vec(tree, 1..6).prop_map(move |trees| {
            let trees = trees
                .into_iter()
                .enumerate()
                .map(|(t, (picks, values, label))| {
                    let mut present = vec![spec.roots().start];
                    for pick in picks {
                        let free: Vec<usize> = present
                            .iter()
                            .flat_map(|&b| spec.children(b))
                            .filter(|c| !present.contains(c))
                            .collect();
                        if free.is_empty() {
                            break;
                        }
                        present.push(free[pick.index(free.len())]);
                    }
                    let branches: BTreeMap<usize, Vec<f64>> = present
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| (b, values[i * q..(i + 1) * q].to_vec()))
                        .collect();
                    Tree::new(format!("tree{t}"), label, branches).unwrap()
                })
                .collect();
            ForestFile::new(spec, trees)
        })
    })
}

proptest! {
    #[test]
    fn forest_text_roundtrip(f in forest()) {
        let text = format_forest(&f).unwrap();
        let back = parse_forest(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(format_forest(&back).unwrap(), text);
    }

    #[test]
    fn matrix_csv_roundtrip(rows in 1usize..8, cols in 1usize..6, values in prop::collection::vec(0.0..1e6f64, 48)) {
        let m = DMatrix::from_fn(rows, cols, |i, j| values[i * cols + j]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_matrix_csv(&m, &path).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        prop_assert_eq!(back.shape(), m.shape());
        prop_assert!((back - &m).abs().max() <= 1e-12 * m.abs().max().max(1.0));
    }

    #[test]
    fn labels_csv_roundtrip(labels in prop::collection::vec(0usize..5, 1..20)) {
        let ids: Vec<String> = (0..labels.len()).map(|i| format!("t{i}")).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        write_labels_csv(&ids, &labels, &path).unwrap();
        prop_assert_eq!(read_labels_csv(&path).unwrap(), (ids, labels));
    }
}
