use num_complex::Complex64;

use super::types::{GroupEigenStructure, UnitaryEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rng::stream_rng;

const PROFILE_SUM_TOL: f64 = 1e-8;

/// Haar-distributed `m x m` unitary: QR of an i.i.d. `CN(0,1)` matrix with
/// the phases fixed so that the triangular factor has a positive real
/// diagonal.
pub fn haar_unitary(m: usize, seed: u64) -> CMatrix {
    let mut rng = stream_rng(seed, 0);
    let z = linalg::complex_gaussian(&mut rng, m, m);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

/// Random unitary-structure ensemble: the first `r·G` columns of a Haar
/// unitary split into `G` blocks of `r`, each paired with an eigenvalue
/// profile. `profiles` holds one profile per group, or a single profile
/// shared by every group. Each profile must sum to `M`.
pub fn synthesize_unitary_ensemble(
    m: usize,
    g: usize,
    r: usize,
    profiles: &[Vec<f64>],
    seed: u64,
) -> Result<UnitaryEnsemble> {
    if g == 0 || r == 0 {
        return Err(Error::Geometry("need at least one group of rank at least one".into()));
    }
    if r * g > m {
        return Err(Error::Geometry(format!("r*G = {} exceeds M = {m}", r * g)));
    }
    if profiles.len() != 1 && profiles.len() != g {
        return Err(Error::InvalidInput(format!(
            "expected 1 or {g} eigenvalue profiles, got {}",
            profiles.len()
        )));
    }
    for p in profiles {
        if p.len() != r {
            return Err(Error::InvalidInput(format!("profile {p:?} does not have {r} entries")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - m as f64).abs() > PROFILE_SUM_TOL * m as f64 {
            return Err(Error::InvalidInput(format!("profile {p:?} sums to {sum}, not {m}")));
        }
    }
    let u = haar_unitary(m, seed);
    let groups = (0..g)
        .map(|gi| {
            let mut lam = profiles[if profiles.len() == 1 { 0 } else { gi }].clone();
            lam.sort_by(|a, b| b.total_cmp(a));
            let basis = u.columns(gi * r, r).into_owned();
            GroupEigenStructure::new(basis, lam)
        })
        .collect::<Result<Vec<_>>>()?;
    UnitaryEnsemble::new(groups)
}
