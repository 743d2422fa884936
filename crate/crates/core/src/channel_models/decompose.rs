use super::types::{CovarianceMatrix, GroupEigenStructure};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Default effective-rank rule: keep eigenvalues within a factor 1e-4 of
/// the largest.
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-4;

/// Karhunen–Loève factor of `cov` truncated to its effective rank: the
/// eigenpairs with `λ ≥ rank_threshold · λ_max`, nonincreasing.
pub fn eigen_decompose(cov: &CovarianceMatrix, rank_threshold: f64) -> Result<GroupEigenStructure> {
    if !(rank_threshold > 0.0 && rank_threshold < 1.0) {
        return Err(Error::InvalidInput(format!(
            "rank threshold {rank_threshold} must lie in (0, 1)"
        )));
    }
    let entries = cov.entries();
    let scale = linalg::max_abs(entries).max(1.0);
    if linalg::hermitian_defect(entries) > CovarianceMatrix::HERMITIAN_TOL * scale {
        return Err(Error::InvalidInput("covariance is not Hermitian".into()));
    }
    let (values, vectors) = linalg::hermitian_eigen(entries);
    let largest = values[0];
    if !(largest > 0.0) {
        return Err(Error::InvalidInput("covariance has no positive eigenvalue".into()));
    }
    let keep = values
        .iter()
        .take_while(|&&l| l >= rank_threshold * largest && l > 0.0)
        .count();
    let basis: CMatrix = vectors.columns(0, keep).into_owned();
    GroupEigenStructure::new(basis, values[..keep].to_vec())
}
