//! Adaptive measurement of quantum-dot current maps.
//!
//! An ensemble of candidate reconstructions is conditioned on the pixels
//! measured so far; the next pixels are those whose outcome is expected to
//! move the ensemble weights the most.

pub mod acquisition;
pub mod device;
pub mod error;
pub mod grid;
pub mod harness;
pub mod metrics;
pub mod numeric;
pub mod posterior;

pub use error::{Error, Result};
