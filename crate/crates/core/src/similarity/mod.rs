//! Weighted Gower dissimilarity and its similarity complement.

mod gower;
mod io;
mod matrix;

pub use gower::{
    gower_input, gower_matrix, gower_matrix_from, gower_pair, Cell, FeatureRanges, GowerColumn, GowerInput, GowerValues,
};
pub use io::{
    decode_upper_triangle, encode_upper_triangle, read_binary, sidecar_path, write_binary, write_matrix_csv,
    MatrixSidecar, BINARY_LAYOUT,
};
pub use matrix::{to_similarity, DissimilarityMatrix, SimilarityMatrix, SymMatrix};
