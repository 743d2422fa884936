//! Capacity analysis of spatially correlated multiuser MIMO downlinks.
//!
//! The crate is organised around five pieces:
//!
//! * [`channel_models`]: one-ring covariances, Karhunen–Loève factors,
//!   synthetic unitary-structure ensembles, eigenvalue spectra and
//!   channel sampling.
//! * [`capacity`]: Monte Carlo ergodic DPC sum capacity through the dual
//!   multiple-access channel with sum-power waterfilling.
//! * [`asymptotics`]: closed-form high-SNR, large-K and large-system
//!   capacity expressions together with the random-matrix identities they
//!   rest on.
//! * [`pilot`]: training-overhead aware pre-log factors, eigenmode
//!   dimensioning and pilot-aided capacity bounds, plus a training
//!   simulator.
//! * [`experiments`]: configuration-driven figure regeneration producing
//!   self-describing result tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod capacity;
pub mod channel_models;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod output;
pub mod pilot;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};

/// Crate version stamped into every emitted result row.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Converts an SNR in dB to the linear total transmit power budget.
pub fn db_to_linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}
