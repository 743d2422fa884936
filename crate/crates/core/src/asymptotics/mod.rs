//! Closed-form high-SNR and large-system capacity results, together with
//! the random-matrix identities they rest on. All `o(1)` terms are dropped;
//! logarithms are base 2 unless a function says otherwise.

mod bounds;
mod fiedler;
mod fit;
mod special;

pub use bounds::{
    highsnr_bounds, iid_highsnr, intra_group_coop_capacity, intra_group_coop_value, large_k_capacity,
    large_system_ratio, offset_decomposition, BoundPair, BoundRow, EigenvalueProfile, LargeSystemPopulation,
    OffsetDecomposition, Regime,
};
pub(crate) use bounds::{mu_excess_term, xlog_inv};
pub use fiedler::fiedler_det_bounds;
pub use fit::{affine_fit, AffineApprox};
pub use special::{
    harmonic, harmonic_expansion, harmonic_psi, harmonic_range, kappa, marginal_gain_cap, marginal_gain_estimate,
    psi_table, wishart_logdet_mean, EULER_GAMMA,
};

/// `(1/M) Σ_g log2 |Λ_g|` for a profile spanning `M` dimensions. Bounded
/// above by `log2 G` for trace-normalised profiles and below by
/// `log2 λ_min`.
pub fn mean_log2_eigenvalue(profile: &EigenvalueProfile) -> f64 {
    let n = (profile.num_groups() * profile.rank()) as f64;
    profile.log2_det_sum() / n
}
