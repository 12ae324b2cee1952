//! Exact arithmetic: rationals, univariate polynomials over Q and cyclotomic fields.

mod cyclotomic;
pub mod linalg;
mod poly;
mod rational;

pub use cyclotomic::{euler_phi, unit_inverse, CyclotomicNumber};
pub use linalg::Scalar;
pub use poly::{cyclotomic_polynomial, poly_ext_gcd, poly_gcd, PolyQ};
pub use rational::{format_rational, parse_rational, Rational};
