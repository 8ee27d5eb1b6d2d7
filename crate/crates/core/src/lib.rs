//! Numerical laboratory for zero sets of sup-norm perturbations.
//!
//! The crate builds a multi-scale continuous function with a prescribed
//! modulus of continuity, certifies that every perturbation within a
//! sup-norm budget `eps` keeps many zeros (one per trapped grid cube), and
//! constructs piecewise-linear perturbations that remove as many zeros as
//! possible. The [`driver`] module sweeps `eps` over a dyadic grid and
//! compares the empirical counts against the analytic envelopes.
//!
//! Layout:
//!
//! * [`modulus`] moduli of continuity, their inverses, minimal moduli of samples
//! * [`funcrep`] piecewise-multilinear grid functions, sup distance, zero counting
//! * [`extremal`] exact evaluation of the multi-scale extremal function
//! * [`chart`] single-chart transport between a manifold and the flat model
//! * [`certifier`] depth resolution, cube enumeration and sign certification
//! * [`adversary`] zero-removing perturbations on `[0,1]`
//! * [`driver`] dyadic sweeps, CSV output and log-log slope fits

pub mod adversary;
pub mod certifier;
pub mod chart;
pub mod driver;
pub mod dyadic;
mod error;
pub mod extremal;
pub mod field;
pub mod funcrep;
pub mod modulus;

pub use error::{Error, Result};
pub use field::{FnField, VectorField};
