//! Spectral outliers of sparse random symmetric matrices: samplers,
//! predictors, eigensolvers and the combinatorial machinery behind the
//! trace-method upper bound and the test-vector lower bound.

pub mod dyck;
pub mod error;
pub mod graphcomb;
pub mod lowerbound;
pub mod majorizers;
pub mod pathenc;
pub mod sampler;
pub mod spectral;

pub use error::{Error, Result};
