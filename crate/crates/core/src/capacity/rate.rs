use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Per-user powers of the dual uplink under a sum-power budget `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
    pub budget: f64,
}

impl PowerAllocation {
    pub fn new(powers: Vec<f64>, budget: f64) -> Result<Self> {
        if !(budget >= 0.0 && budget.is_finite()) {
            return Err(Error::InvalidInput(format!("power budget {budget} must be finite and nonnegative")));
        }
        if let Some(p) = powers.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidInput(format!("negative or non-finite power {p}")));
        }
        let total: f64 = powers.iter().sum();
        if total > budget + 1e-9 * budget.max(1.0) {
            return Err(Error::InvalidInput(format!("powers sum to {total}, above the budget {budget}")));
        }
        Ok(Self { powers, budget })
    }

    /// `P / K` to every user.
    pub fn uniform(users: usize, budget: f64) -> Self {
        let each = if users == 0 { 0.0 } else { budget / users as f64 };
        Self {
            powers: vec![each; users],
            budget,
        }
    }

    pub fn total(&self) -> f64 {
        self.powers.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }
}

/// `ln det(I + H diag(p) H^H)` in nats, using whichever of the `M x M` or
/// `K x K` Gram forms is smaller.
pub(crate) fn ln_det_rate(h: &CMatrix, powers: &[f64]) -> Option<f64> {
    let (m, k) = h.shape();
    if k == 0 || m == 0 {
        return Some(0.0);
    }
    let mut hs = h.clone();
    for (j, p) in powers.iter().enumerate() {
        let s = p.sqrt();
        hs.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    let gram = if k <= m {
        hs.adjoint() * &hs + CMatrix::identity(k, k)
    } else {
        &hs * hs.adjoint() + CMatrix::identity(m, m)
    };
    linalg::ln_det_hpd(&gram)
}

/// Dual-MAC sum rate `log2 det(I + Σ_k p_k h_k h_k^H)` in bits for the
/// channel columns `h_k` of `channels`.
pub fn dual_mac_sum_rate(channels: &CMatrix, powers: &PowerAllocation) -> Result<f64> {
    if channels.ncols() != powers.len() {
        return Err(Error::InvalidInput(format!(
            "{} channel columns but {} powers",
            channels.ncols(),
            powers.len()
        )));
    }
    ln_det_rate(channels, &powers.powers)
        .map(|nats| nats / std::f64::consts::LN_2)
        .ok_or_else(|| Error::InvalidInput("channel Gram matrix is not finite".into()))
}

/// Sum of the per-block rates for block-diagonal channels, powers laid out
/// block after block.
pub(crate) fn ln_det_rate_blocks(blocks: &[CMatrix], powers: &[f64]) -> Option<f64> {
    let mut off = 0;
    let mut total = 0.0;
    for b in blocks {
        let k = b.ncols();
        total += ln_det_rate(b, &powers[off..off + k])?;
        off += k;
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::rng::stream_rng;

    #[test]
    fn scalar_channel() {
        let h = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let p = PowerAllocation::new(vec![3.0], 3.0).unwrap();
        assert!((dual_mac_sum_rate(&h, &p).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_columns() {
        let h = CMatrix::identity(4, 3);
        let p = PowerAllocation::uniform(3, 6.0);
        let expect = 3.0 * 3f64.log2();
        assert!((dual_mac_sum_rate(&h, &p).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn both_gram_forms_agree() {
        let mut rng = stream_rng(9, 0);
        let h = linalg::complex_gaussian(&mut rng, 3, 5);
        let ht = h.adjoint();
        let p = vec![0.5, 1.0, 2.0, 0.1, 0.0];
        let a = ln_det_rate(&h, &p).unwrap();
        // transpose problem: same nonzero spectrum when powers are uniform
        let q = vec![1.0; 5];
        let b1 = ln_det_rate(&h, &q).unwrap();
        let b2 = ln_det_rate(&ht, &[1.0; 3]).unwrap();
        assert!((b1 - b2).abs() < 1e-10);
        assert!(a.is_finite());
    }

    #[test]
    fn mismatch_rejected() {
        let h = CMatrix::identity(2, 2);
        assert!(dual_mac_sum_rate(&h, &PowerAllocation::uniform(3, 1.0)).is_err());
        assert!(PowerAllocation::new(vec![1.0, 1.0], 1.0).is_err());
    }
}
