//! Exact q-series engine for Nahm sums, Bailey pairs and their product
//! identities, with a numerical layer for modular transformation checks.

pub mod bailey;
pub mod catalog;
pub mod error;
pub mod linalg;
pub mod modular;
pub mod nahm;
pub mod products;
pub mod series;

pub use error::{Error, Result};
pub use series::{BiSeries, Exponent, Monomial, QSeries, Rational, ZSeries};
