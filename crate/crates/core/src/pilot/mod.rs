//! Pilot overhead: training schemes that exploit orthogonal group
//! eigenspaces, stream-count dimensioning and the resulting pilot-aware
//! capacity bounds.

mod bounds;
mod dimensioning;
mod training;

pub use bounds::{
    corollary_vanishing_spread, pilot_bound_large_g, pilot_bound_large_r, pilot_bound_system2, system2_objective,
    system2_optimize, System2Optimum,
};
pub use dimensioning::{
    pilot_symbols, prelog_iid, prelog_multiclass, prelog_tcd, q_star, PilotRow, PrelogRegime, PrelogResult,
};
pub use training::{
    simulate_training, GroupEstimate, Scheme, TrainingOptions, TrainingReport, TrainingRow, LEAKAGE_TOL,
};
