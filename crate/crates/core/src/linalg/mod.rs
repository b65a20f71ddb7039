//! Dense real and complex matrix kernel.

mod complex;
mod lu;
mod matrix;
mod schur;
mod svd;

use thiserror::Error;

pub use complex::CMatrix;
pub use lu::{
    condition_number, determinant, invert, invert_checked, Inverse, LuDecomposition,
    DEFAULT_KAPPA_MAX,
};
pub use matrix::Matrix;
pub use schur::{
    schur_complement, schur_complement_with, Bordered, BorderedPartition, SchurComplements,
};
pub use svd::{numerical_rank, singular_values, RankReport, DEFAULT_RANK_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("condition number {condition:e} exceeds the inversion ceiling")]
    IllConditioned { condition: f64 },
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("non-finite entry")]
    NonFinite,
    #[error("rank tolerance {0} outside (0, 1)")]
    InvalidTolerance(f64),
    #[error("bad partition: {0}")]
    BadPartition(String),
}
