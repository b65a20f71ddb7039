//! Partial-determinant tests for correlated state-preparation and measurement
//! errors in multiqudit tomography data.
//!
//! The numerical core ([`linalg`], [`tensor`], [`pd`]) is generic over the
//! real scalar type; the aliases below fix it to `f64` (or `f32`).

pub mod linalg;
pub mod model;
pub mod pd;
pub mod schemes;
mod scalar;
pub mod tensor;

pub use scalar::Scalar;

pub type RealMatrix = linalg::Matrix<f64>;
pub type RealMatrix32 = linalg::Matrix<f32>;
pub type ComplexMatrix = linalg::CMatrix<f64>;
pub type DataTensor = tensor::Tensor<f64>;
