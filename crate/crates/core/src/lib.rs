//! Vertical-farm agri-energy simulator.

pub mod chamber;
pub mod config;
pub mod crop;
pub mod econ;
pub mod error;
pub mod hvac;
pub mod psychro;
pub mod stats;
pub mod sustain;
pub mod sweep;
pub mod table;
pub mod weather;

pub use error::{Error, Result};
