//! Merge trees of piecewise-linear functions, their edit distance, persistence
//! diagrams and the statistical tooling built on top of them.

// `!(a <= b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assignment;
pub mod datasets;
pub mod edit_distance;
pub mod error;
pub mod merge_tree;
pub mod persistence;
pub mod pruning;
pub mod pl_function;
pub mod scalar;
pub mod tree_stats;
mod union_find;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PlFunction = pl_function::PlFunction<f64>;
pub type MergeTree = merge_tree::MergeTree<f64>;
pub type WeightedMergeTree = merge_tree::WeightedMergeTree<f64>;
pub type DistanceMatrix = analysis::DistanceMatrix<f64>;
pub type Dataset = datasets::Dataset<f64>;
pub type PersistenceDiagram = persistence::PersistenceDiagram<f64>;
