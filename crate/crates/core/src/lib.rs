pub mod cli;
pub mod coefficients;
pub mod curved;
pub mod error;
pub mod flat;
pub mod geometry;
pub mod invariant;
pub mod linalg;
pub mod metric;
pub mod operator;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod vector_field;
pub mod verify;

pub use error::{Error, Result};
