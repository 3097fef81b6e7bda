//! Three-level open quantum system coupled to a possibly non-thermal boson
//! bath: coupling spectra, static and finite-time decay rates, the
//! Lindblad-form generator, RK4 evolution and positivity diagnostics.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod evolve;
pub mod generator;
pub mod operators;
pub mod rates;
pub mod spectra;

pub use error::{Error, Result};
