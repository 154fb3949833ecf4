//! Simulation of time-resolved photoelectron momentum maps for molecules
//! carrying a coherent electronic wave packet, probed by a broadband
//! attosecond pulse.
//!
//! All internal arithmetic is in atomic units. Conversion to eV, fs and Å
//! happens only at I/O boundaries (see [`units`]).

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csf_algebra;
pub mod density;
pub mod error;
pub mod huckel;
pub mod io;
pub mod model;
pub mod momentum;
pub mod quadrature;
pub mod scenario;
pub mod signal;
pub mod units;

pub use error::{Error, Result};
