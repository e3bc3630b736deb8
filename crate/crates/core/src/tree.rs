//! Support-tree indexing, attributed trees and Topology-Attribute matrices.
//!
//! Branches of the m-ary support tree are numbered 1..=p level by level,
//! left to right. With a trunk, branch 1 is the trunk and level `l` holds
//! `m^l` branches; without one, the first level holds the `m` branches
//! hanging off the root vertex.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// The shared m-ary indexing frame every tree of a population lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SupportTreeSpec {
    order: usize,
    depth: usize,
    trunk: bool,
    branches: usize,
}

impl SupportTreeSpec {
    pub fn new(order: usize, depth: usize, trunk: bool) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidOrder(order));
        }
        if depth < 1 {
            return Err(Error::InvalidDepth(depth));
        }
        // sum of m^l over the populated levels
        let (first, last) = if trunk { (0, depth) } else { (1, depth) };
        let mut total: usize = 0;
        for level in first..=last {
            let width = u32::try_from(level)
                .ok()
                .and_then(|l| order.checked_pow(l))
                .ok_or(Error::InvalidDepth(depth))?;
            total = total.checked_add(width).ok_or(Error::InvalidDepth(depth))?;
        }
        Ok(Self {
            order,
            depth,
            trunk,
            branches: total,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of branch levels below the trunk.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn trunk(&self) -> bool {
        self.trunk
    }

    /// Total branch count `p`.
    pub fn branch_count(&self) -> usize {
        self.branches
    }

    pub fn contains(&self, index: usize) -> bool {
        (1..=self.branches).contains(&index)
    }

    fn check(&self, index: usize) -> Result<()> {
        if self.contains(index) {
            Ok(())
        } else {
            Err(Error::BranchOutOfRange {
                index,
                p: self.branches,
            })
        }
    }

    /// Parent branch of `index`, or `None` when the branch hangs off the root vertex.
    pub fn parent(&self, index: usize) -> Result<Option<usize>> {
        self.check(index)?;
        let m = self.order;
        Ok(if self.trunk {
            (index >= 2).then(|| (index - 2) / m + 1)
        } else {
            (index > m).then(|| (index - 1) / m)
        })
    }

    /// The `j`-th child (1-based) of `index`, if it fits inside the support tree.
    pub fn child(&self, index: usize, j: usize) -> Option<usize> {
        if !self.contains(index) || j == 0 || j > self.order {
            return None;
        }
        let m = self.order;
        let c = if self.trunk {
            m * (index - 1) + j + 1
        } else {
            m * index + j
        };
        self.contains(c).then_some(c)
    }

    /// Indices of all children of `index` (empty at the deepest level).
    pub fn children(&self, index: usize) -> Range<usize> {
        match (self.child(index, 1), self.child(index, self.order)) {
            (Some(first), Some(last)) => first..last + 1,
            _ => 0..0,
        }
    }

    /// Branches without a parent branch.
    pub fn roots(&self) -> Range<usize> {
        if self.trunk {
            1..2
        } else {
            1..self.order + 1
        }
    }

    /// Level of a branch: the trunk is level 0, branches below it start at 1.
    pub fn level(&self, index: usize) -> Result<usize> {
        self.check(index)?;
        let mut level = if self.trunk { 0 } else { 1 };
        let mut cursor = index;
        while let Some(parent) = self.parent(cursor)? {
            cursor = parent;
            level += 1;
        }
        Ok(level)
    }

    /// Validates that `indices` form a rooted, connected subtree.
    pub fn check_connected<'a, I>(&self, indices: I, present: impl Fn(usize) -> bool) -> Result<()>
    where
        I: IntoIterator<Item = &'a usize>,
    {
        for &index in indices {
            if let Some(parent) = self.parent(index)? {
                if !present(parent) {
                    return Err(Error::Disconnected { index, parent });
                }
            }
        }
        Ok(())
    }
}

/// One attributed tree: a sparse map from support index to a row of
/// strictly positive attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    id: String,
    label: Option<String>,
    branches: BTreeMap<usize, Vec<f64>>,
}

impl Tree {
    pub fn new(
        id: impl Into<String>,
        label: Option<String>,
        branches: BTreeMap<usize, Vec<f64>>,
    ) -> Result<Self> {
        let q = branches
            .values()
            .next()
            .map(Vec::len)
            .ok_or(Error::EmptyTree)?;
        if q == 0 {
            return Err(Error::InvalidConfig("trees need at least one attribute".into()));
        }
        for (&index, row) in &branches {
            if index == 0 {
                return Err(Error::BranchOutOfRange { index, p: 0 });
            }
            if row.len() != q {
                return Err(Error::AttributeCount {
                    index,
                    got: row.len(),
                    expected: q,
                });
            }
            if let Some((attr, &value)) = row
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v > 0.0))
            {
                return Err(Error::NonPositiveAttribute { index, attr, value });
            }
        }
        Ok(Self {
            id: id.into(),
            label,
            branches,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: Option<String>) -> Self {
        self.label = label;
        self
    }

    /// Attribute count.
    pub fn q(&self) -> usize {
        self.branches.values().next().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.branches.contains_key(&index)
    }

    pub fn attributes(&self, index: usize) -> Option<&[f64]> {
        self.branches.get(&index).map(Vec::as_slice)
    }

    pub fn branches(&self) -> &BTreeMap<usize, Vec<f64>> {
        &self.branches
    }

    pub fn branch_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.branches.keys().copied()
    }

    pub fn into_parts(self) -> (String, Option<String>, BTreeMap<usize, Vec<f64>>) {
        (self.id, self.label, self.branches)
    }

    /// Checks index range and connectivity against a support tree.
    pub fn validate(&self, spec: &SupportTreeSpec) -> Result<()> {
        for &index in self.branches.keys() {
            spec.check(index)?;
        }
        spec.check_connected(self.branches.keys(), |i| self.branches.contains_key(&i))
    }

    /// Dense p×q T-A matrix: row `i - 1` holds branch `i`, absent branches are zero rows.
    pub fn to_ta_matrix(&self, spec: &SupportTreeSpec) -> Result<TaMatrix> {
        self.validate(spec)?;
        let q = self.q();
        let mut entries = DMatrix::zeros(spec.branch_count(), q);
        for (&index, row) in &self.branches {
            for (j, &v) in row.iter().enumerate() {
                entries[(index - 1, j)] = v;
            }
        }
        Ok(TaMatrix { entries })
    }
}

/// Dense p×q Topology-Attribute matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TaMatrix {
    entries: DMatrix<f64>,
}

impl TaMatrix {
    pub fn from_entries(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    pub fn p(&self) -> usize {
        self.entries.nrows()
    }

    pub fn q(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// True when every row is entirely zero or entirely above `threshold`.
    pub fn is_positive_uniform(&self, threshold: f64) -> bool {
        self.entries.row_iter().all(|row| {
            row.iter().all(|&v| v == 0.0) || row.iter().all(|&v| v > threshold)
        })
    }

    /// Single-column matrix with entries in {0, 1}.
    pub fn is_degenerate(&self) -> bool {
        self.q() == 1 && self.entries.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Column-major stacking into a vector of length p·q.
    pub fn vectorize(&self) -> DVector<f64> {
        vectorize(self)
    }
}

pub fn vectorize(ta: &TaMatrix) -> DVector<f64> {
    DVector::from_column_slice(ta.entries.as_slice())
}

/// Inverse of [`vectorize`]. Positive uniformity is not enforced here: raw
/// factorization columns may violate it.
pub fn unvectorize(v: &[f64], p: usize, q: usize) -> Result<TaMatrix> {
    if p.checked_mul(q) != Some(v.len()) {
        return Err(Error::LengthMismatch { len: v.len(), p, q });
    }
    Ok(TaMatrix {
        entries: DMatrix::from_column_slice(p, q, v),
    })
}
