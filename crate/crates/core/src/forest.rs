use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tree::{unvectorize, SupportTreeSpec, TaMatrix, Tree};

/// The pq×n matrix whose columns are the vectorized T-A matrices of a tree
/// population, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestMatrix {
    spec: SupportTreeSpec,
    q: usize,
    data: DMatrix<f64>,
    ids: Vec<String>,
    labels: Vec<Option<String>>,
}

impl ForestMatrix {
    pub fn assemble(trees: &[Tree], spec: &SupportTreeSpec) -> Result<Self> {
        let first = trees.first().ok_or(Error::EmptyInput("tree list"))?;
        let q = first.q();
        let p = spec.branch_count();
        let mut data = DMatrix::zeros(p * q, trees.len());
        for (l, tree) in trees.iter().enumerate() {
            if tree.q() != q {
                return Err(Error::AttributeCount {
                    index: l,
                    got: tree.q(),
                    expected: q,
                });
            }
            let ta = tree.to_ta_matrix(spec)?;
            data.column_mut(l).copy_from_slice(ta.entries().as_slice());
        }
        Ok(Self {
            spec: *spec,
            q,
            data,
            ids: trees.iter().map(|t| t.id().into()).collect(),
            labels: trees.iter().map(|t| t.label().map(Into::into)).collect(),
        })
    }

    pub fn spec(&self) -> &SupportTreeSpec {
        &self.spec
    }

    pub fn p(&self) -> usize {
        self.spec.branch_count()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Tree count.
    pub fn n(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Ground-truth labels when every tree carries one.
    pub fn truth_labels(&self) -> Option<Vec<&str>> {
        self.labels.iter().map(Option::as_deref).collect()
    }

    /// T-A matrix of column `l`.
    pub fn ta_matrix(&self, l: usize) -> Result<TaMatrix> {
        if l >= self.n() {
            return Err(Error::DimensionMismatch {
                left: l,
                right: self.n(),
            });
        }
        unvectorize(self.data.column(l).as_slice(), self.p(), self.q)
    }

    /// Rescales each attribute so its largest entry across the forest is 1.
    /// Attributes that are zero everywhere are left alone.
    pub fn normalized_by_attribute_max(&self) -> Self {
        let p = self.p();
        let mut data = self.data.clone();
        for attr in 0..self.q {
            let rows = attr * p..(attr + 1) * p;
            let max = data
                .rows_range(rows.clone())
                .iter()
                .fold(0.0_f64, |acc, &v| acc.max(v));
            if max > 0.0 {
                data.rows_range_mut(rows).scale_mut(1.0 / max);
            }
        }
        Self {
            data,
            ..self.clone()
        }
    }
}

pub fn assemble_forest(trees: &[Tree], spec: &SupportTreeSpec) -> Result<ForestMatrix> {
    ForestMatrix::assemble(trees, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::string::ToString;
    use alloc::vec;

    fn sample(id: &str, scale: f64) -> Tree {
        let branches: BTreeMap<_, _> = [
            (1, vec![scale, 2.0 * scale]),
            (2, vec![3.0 * scale, 0.5]),
            (5, vec![1.0, 1.0]),
        ]
        .into_iter()
        .collect();
        Tree::new(id, Some("A".into()), branches).unwrap()
    }

    #[test]
    fn single_tree_column_is_its_vector() {
        let spec = SupportTreeSpec::new(2, 2, true).unwrap();
        let t = sample("a", 1.0);
        let f = assemble_forest(core::slice::from_ref(&t), &spec).unwrap();
        assert_eq!(f.data().ncols(), 1);
        assert_eq!(f.data().nrows(), 14);
        assert_eq!(
            f.data().column(0).as_slice(),
            t.to_ta_matrix(&spec).unwrap().vectorize().as_slice()
        );
    }

    #[test]
    fn identical_trees_identical_columns() {
        let spec = SupportTreeSpec::new(2, 2, true).unwrap();
        let f = assemble_forest(&[sample("a", 2.0), sample("b", 2.0)], &spec).unwrap();
        assert_eq!(f.data().column(0), f.data().column(1));
        assert_eq!(f.ids(), &["a".to_string(), "b".to_string()]);
        assert_eq!(f.truth_labels(), Some(vec!["A", "A"]));
    }

    #[test]
    fn rejects_mixed_attribute_counts() {
        let spec = SupportTreeSpec::new(2, 2, true).unwrap();
        let other = Tree::new("c", None, [(1, vec![1.0])].into_iter().collect()).unwrap();
        assert!(matches!(
            assemble_forest(&[sample("a", 1.0), other], &spec),
            Err(Error::AttributeCount { index: 1, .. })
        ));
        assert_eq!(
            assemble_forest(&[], &spec).unwrap_err(),
            Error::EmptyInput("tree list")
        );
    }

    #[test]
    fn max_normalization_per_attribute() {
        let spec = SupportTreeSpec::new(2, 2, true).unwrap();
        let f = assemble_forest(&[sample("a", 1.0), sample("b", 4.0)], &spec).unwrap();
        let g = f.normalized_by_attribute_max();
        let p = f.p();
        let max_first = g.data().rows_range(0..p).max();
        let max_second = g.data().rows_range(p..2 * p).max();
        assert!((max_first - 1.0).abs() < 1e-15);
        assert!((max_second - 1.0).abs() < 1e-15);
        // zero pattern unchanged
        for (a, b) in f.data().iter().zip(g.data().iter()) {
            assert_eq!(*a == 0.0, *b == 0.0);
        }
    }
}
