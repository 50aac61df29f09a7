//! Exact univariate algebra over Q.

pub mod intpoly;
pub mod polynomial;
pub mod ratfunc;

pub use intpoly::IntPoly;
pub use polynomial::Polynomial;
pub use ratfunc::{chebyshev_t, ExtRational, RationalFunction};
