//! Exact large-color R-matrix state sums.
//!
//! The crate computes the two-variable knot-complement series `F_K(x, q)` as a
//! weight-stratified reduced quantum trace over Verma-module R-matrices, checks it
//! against classical invariants (Burau/Alexander, finite-color Jones) and closed-form
//! q-hypergeometric oracles, and feeds the result into Laplace-transform surgery
//! formulas producing `Ẑ` q-series.
//!
//! All arithmetic is exact. Series carry their own validity metadata (`x` window and
//! `q` truncation order), so mixing inputs of different precision never produces
//! coefficients claimed valid beyond what the inputs support.

pub mod algebra;
pub mod braid;
pub mod closedform;
pub mod error;
pub mod jones;
pub mod knots;
pub(crate) mod poly;
pub mod rmatrix;
pub mod statesum;
pub mod surgery;
pub mod verify;

pub use algebra::{BiSeries, Exp2, MultiSeries, Rational};
pub use braid::{BraidWord, LinkClosure};
pub use error::{Error, Result};
pub use statesum::{Exactness, Expansion, FkResult, Module};
