//! Exact truncated series: univariate q-series, bivariate `(x, q)` series and
//! the z-Laurent series used for constant terms.

mod biseries;
mod monomial;
mod pochhammer;
mod qseries;
pub mod rational;
mod zseries;

pub use biseries::{BiDiscrepancy, BiSeries};
pub use monomial::Monomial;
pub use pochhammer::{binomial_product, pochhammer_finite, pochhammer_infinite, pochhammer_power};
pub use qseries::{Discrepancy, QSeries};
pub use rational::{exp, exp_int, rat, rat_int, Exponent, Rational};
pub use zseries::ZSeries;
