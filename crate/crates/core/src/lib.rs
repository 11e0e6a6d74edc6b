//! Spectral computations for periodic phased CMV operators and coined quantum
//! walks: transfer matrices, band structure, density of states, Schur-function
//! bounds, thin-spectrum constructions and walk transport diagnostics.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmv;
pub mod construction;
pub mod error;
pub mod spectral;
pub mod su11;
pub mod transfer;
#[cfg(feature = "verify")]
pub mod verify;
pub mod walk;

pub use error::{Error, Result};

/// Library version, recorded in CLI manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(test)]
pub(crate) mod test_util;
