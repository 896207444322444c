//! Analytical energy-harvesting and uplink-throughput models for a
//! wireless-powered two-tier (sub-6 GHz / mmWave) cellular network, plus a
//! Poisson-point-process Monte Carlo simulator that cross-checks them.
//!
//! All quantities are SI: watts, meters, hertz, bits per second.

pub mod energy;
pub mod error;
pub mod mcsim;
pub mod netmodel;
pub mod numerics;
pub mod throughput;

pub use error::{Error, Result};
