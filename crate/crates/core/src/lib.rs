//! Hard-sphere and primitive-model electrolyte thermodynamics from the
//! Ornstein–Zernike equation.
//!
//! Closed-form Percus–Yevick results for one component, the BMCSL mixture
//! equation of state, the full MSA electrolyte solution, and a grid-based
//! OZ/PY solver used as an independent numerical check.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks

pub mod cli;
pub mod error;
pub mod format;
pub mod msa;
pub mod oz_numeric;
pub mod py_mixture;
pub mod py_single;
pub mod quadrature;
pub mod system;

pub use error::{Error, Result};
pub use system::{make_mixture, moments, Mixture, Moments, Species};
