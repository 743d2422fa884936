use rand::Rng;

use super::decompose::eigen_decompose;
use super::types::{CovarianceMatrix, GroupEigenStructure};
use crate::error::Result;
use crate::linalg::{self, CMatrix};
use crate::rng::stream_rng;

/// Innovations `W` (`r x users`, i.i.d. `CN(0,1)`) and the resulting
/// channels `H = U Λ^{1/2} W` for one group.
pub fn draw_group_innovations<R: Rng + ?Sized>(
    group: &GroupEigenStructure,
    users: usize,
    rng: &mut R,
) -> (CMatrix, CMatrix) {
    let w = linalg::complex_gaussian(rng, group.rank(), users);
    let h = group.factor() * &w;
    (w, h)
}

/// One `M x users_per_group` channel matrix per group, each user drawn
/// independently. Group `g` uses random stream `g` of `seed`.
pub fn sample_channels(groups: &[GroupEigenStructure], users_per_group: usize, seed: u64) -> Vec<CMatrix> {
    groups
        .iter()
        .enumerate()
        .map(|(g, grp)| {
            let mut rng = stream_rng(seed, g as u64);
            draw_group_innovations(grp, users_per_group, &mut rng).1
        })
        .collect()
}

/// As [`sample_channels`] for raw covariances, coloured with every
/// eigenvalue above 1e-12 of the largest.
pub fn sample_channels_from_covariances(
    covariances: &[CovarianceMatrix],
    users_per_group: usize,
    seed: u64,
) -> Result<Vec<CMatrix>> {
    let groups = covariances
        .iter()
        .map(|c| eigen_decompose(c, 1e-12))
        .collect::<Result<Vec<_>>>()?;
    Ok(sample_channels(&groups, users_per_group, seed))
}
