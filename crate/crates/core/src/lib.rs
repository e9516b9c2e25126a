//! Weighted Gower similarity networks with mutual kNN community detection
//! and statistical characterization of the resulting clusters.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the pipeline's `f64` instantiation.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checksum;
pub mod dataset;
pub mod error;
mod float_serde;
pub mod inference;
pub mod linalg;
pub mod network;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod similarity;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dissimilarity = similarity::DissimilarityMatrix<f64>;
pub type Similarity = similarity::SimilarityMatrix<f64>;
pub type Graph = network::SimilarityGraph<f64>;
pub type Ridge = weights::RidgeModel<f64>;
pub type Forest = weights::Forest<f64>;
pub type Gbrt = weights::Gbrt<f64>;
pub type Tree = weights::RegressionTree<f64>;
pub type KNeighbors = network::KEvaluation<f64>;
