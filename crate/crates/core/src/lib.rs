//! Algebraic and differential toolkit for Weyl tensors, their symmetry
//! spaces, and the C-space condition on Riemannian metrics given in charts.

pub mod catalog;
pub mod cspace;
pub mod curvature;
pub mod error;
pub mod four_dim;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod random;
pub mod tensor;
pub mod weyl;

pub use error::{GeometryError, TensorError};
