//! Exact computations with odd-weight CM Hodge structures.

pub mod acceptance;
pub mod algebra;
pub mod arith;
pub mod cm;
pub mod combinatorics;
pub mod error;
pub mod verifiers;

pub use error::{Error, ErrorClass, Result};
