//! Transmit-correlation models.
//!
//! Users are single-antenna; each user's channel is `h = U Λ^{1/2} w` with
//! `w ~ CN(0, I_r)`, where `U Λ U^H` is the user's (trace-normalised)
//! transmit covariance. Groups of users share a covariance, and a
//! [`UnitaryEnsemble`] collects groups whose eigenspaces are mutually
//! orthogonal.

mod decompose;
mod ensemble;
mod one_ring;
mod sampling;
pub mod schema;
mod spectrum;
mod types;

pub use decompose::{eigen_decompose, DEFAULT_RANK_THRESHOLD};
pub use ensemble::{haar_unitary, synthesize_unitary_ensemble};
pub use one_ring::{one_ring_covariance, one_ring_lag, DEGENERATE_SPREAD};
pub use sampling::{draw_group_innovations, sample_channels, sample_channels_from_covariances};
pub use spectrum::{one_ring_spectrum, szego_logdet_rate, EigenvalueSpectrum, SzegoRate};
pub use types::{CovarianceMatrix, GroupEigenStructure, OneRingParams, UnitaryEnsemble};
