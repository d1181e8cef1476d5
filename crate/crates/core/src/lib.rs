//! Tracy–Widom edge statistics for possibly singular complex Wishart
//! matrices, and the eigenvalue-ratio test for the number of factors in an
//! approximate factor model.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense complex matrices, Hermitian eigenvalues, root
//!   finding, Gauss–Legendre rules, determinants and quantiles.
//! * [`sampling`]: seeded GUE, complex Wishart and factor-panel generators.
//! * [`centering`]: the edge centering and scaling constants `(c, mu, sigma)`.
//! * [`kernel`]: the double-contour correlation kernel, Fredholm
//!   determinants, the Airy kernel and the exact small-size oracles.
//! * [`table`]: Monte Carlo critical values of the max-ratio statistic.
//! * [`factor`]: panels, complexification and the factor-number test.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod centering;
pub mod error;
pub mod factor;
pub mod kernel;
pub mod numerics;
pub mod sampling;
pub mod table;

pub use error::{Error, Result};
