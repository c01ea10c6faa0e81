//! Symbolic-numeric calculator for limiting spectral distributions of random matrices.
//!
//! Distributions are carried as bivariate polynomials `L(u, v)` with rational
//! coefficients whose roots in `u` are an algebraic transform of the law.

pub mod algops;
pub mod bipoly;
pub mod cli;
pub mod density;
pub mod dsl;
pub mod encodings;
pub mod error;
pub mod moments;
pub mod numeric;
pub mod oplaws;
pub mod sampler;

pub use bipoly::{BiPoly, Rational, UniPoly};
pub use error::{Error, Result};
