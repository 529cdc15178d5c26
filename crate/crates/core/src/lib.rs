//! Simulation and analysis of dark-state entanglement generation between two
//! atoms in a lossy cavity, with purification by repeated no-photon detection.
//!
//! Rates are dimensionless (units of the cavity decay rate κ unless stated),
//! and ħ = 1 throughout.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod protocol;
pub mod space;

pub use error::{Error, Result};
