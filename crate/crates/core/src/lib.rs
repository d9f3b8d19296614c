//! Spectral solution of the time-fractional Schrödinger equation
//! i^β ∂_t^α u = −Δu and the mean-square displacement of radial data.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Tabulated constants are kept at the precision they were published with.
#![allow(clippy::excessive_precision)]

pub mod asymptotics;
pub mod caputo;
pub mod dd;
pub mod error;
pub mod gamma;
pub mod mittag_leffler;
pub mod msd;
pub mod oracle;
pub mod quadrature;
pub mod selftest;
pub mod spectral;

pub use error::{Error, Result};
