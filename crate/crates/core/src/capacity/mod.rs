//! Ergodic DPC sum capacity of the MIMO broadcast channel, evaluated on
//! its dual uplink by Monte Carlo.

mod engine;
mod geometry;
mod rate;
mod waterfill;

use serde::{Deserialize, Serialize};

pub use engine::{
    capacity_vs_users_curve, ergodic_sum_capacity, ergodic_sum_capacity_with, simulate_sum_capacity,
    CapacityEstimate, Mode, UserPopulation, WaterfillOptions, MAX_FAILURE_RATE,
};
pub use geometry::SystemGeometry;
pub use rate::{dual_mac_sum_rate, PowerAllocation};
pub use waterfill::{
    sum_power_waterfill, sum_power_waterfill_blocks, waterfill_blocks, WaterfillSolution, DEFAULT_MAX_ITER,
    DEFAULT_TOL_BITS,
};

/// One CSV row of capacity output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub snr_db: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "G")]
    pub g: usize,
    pub r: usize,
    pub mode: String,
    pub mean_bps_hz: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

impl CapacityRow {
    pub fn new(geometry: &SystemGeometry, mode: Mode, est: &CapacityEstimate, seed: u64) -> Self {
        Self {
            snr_db: est.snr_db,
            k: geometry.k,
            m: geometry.m,
            g: geometry.g,
            r: geometry.r,
            mode: mode.as_str().into(),
            mean_bps_hz: est.mean_bps_hz,
            std_error: est.std_error,
            trials: est.trials,
            seed,
        }
    }
}
