//! Clustering of attributed trees.
//!
//! Trees are encoded as Topology-Attribute matrices over a shared m-ary
//! support tree, stacked into a forest matrix, and factorized with a
//! structure-constrained NMF whose basis columns (meta-trees) keep every
//! branch row all-positive or all-zero. The coefficient columns are the
//! trees' signature vectors; they are clustered with normalized cuts or
//! Fréchet-mean K-means under the L1 metric of the meta-tree cone.
//!
//! The crate is `no_std` and only needs `alloc`; file formats and the
//! command-line front end live in the `treeclust` crate.

#![no_std]

extern crate alloc;

pub mod cluster;
pub mod error;
pub mod experiment;
pub mod forest;
pub mod metaspace;
pub mod scnmf;
pub mod seed;
pub mod simgen;
pub mod tree;

pub use error::{Error, Result};
pub use forest::{assemble_forest, ForestMatrix};
pub use metaspace::{Metric, SignatureVector};
pub use scnmf::{FactorizationConfig, MetaBasis};
pub use tree::{SupportTreeSpec, TaMatrix, Tree};

pub use nalgebra::DMatrix;
