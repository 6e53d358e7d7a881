//! Numerical laboratory for the slice `Per1(1)` of cubic polynomials
//! `f_a(z) = z + a z^2 + z^3` with a parabolic fixed point of multiplier 1
//! at the origin.
//!
//! * [`dynamics`]: cubic maps, orbits, fixed points, residue indices.
//! * [`fatou`]: attracting/repelling Fatou coordinates, critical Ecalle
//!   height and its inverse, horn-map multiplier.
//! * [`perturbation`]: perturbations `f_a + delta`, lifted phase,
//!   classification and the verification procedures.
//! * [`scan`]: parameter sweeps with CSV and PPM output.
//! * [`cli`]: the `per1lab` command line.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fatou;
pub mod perturbation;
pub mod scan;

pub use error::{Error, Result};
