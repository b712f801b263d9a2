//! Exact algebra for sh-Lie structures of gauge symmetries.
//!
//! The core types are generic over the coefficient ring (see [`scalar::Coeff`]);
//! the aliases below fix exact rationals, which is what every check uses.

#![allow(clippy::needless_range_loop)]

pub mod coalgebra;
pub mod error;
pub mod gauge;
pub mod hom;
pub mod ikeda;
pub mod jet;
pub mod lin;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod shell;
pub mod shlie;

pub use error::{Error, Result};

/// Exact rational scalar.
pub type Q = num_rational::BigRational;
/// Polynomial over the rationals.
pub type QPoly = poly::Poly<Q>;
