use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use super::special::kappa;
use crate::capacity::SystemGeometry;
use crate::channel_models::UnitaryEnsemble;
use crate::error::{Error, Result};

/// Which closed form produced a [`BoundPair`]. Values from different
/// regimes are not comparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    RLtKprime,
    RGeKprime,
    LargeSystem,
    Pilot,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::RLtKprime => "r_lt_Kprime",
            Regime::RGeKprime => "r_ge_Kprime",
            Regime::LargeSystem => "large_system",
            Regime::Pilot => "pilot",
        }
    }
}

/// Asymptotic sandwich `lower ≤ C ≤ upper` (bits, or bits per antenna /
/// user for ratio results) with the vanishing terms dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
    pub center: f64,
    pub regime: Regime,
    pub flags: Vec<String>,
}

impl BoundPair {
    pub(crate) fn new(lower: f64, upper: f64, center: f64, regime: Regime) -> Self {
        Self {
            lower,
            upper,
            center,
            regime,
            flags: Vec::new(),
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Per-group covariance eigenvalues `λ_{g,1} ≥ ... ≥ λ_{g,r} > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueProfile {
    groups: Vec<Vec<f64>>,
}

impl EigenvalueProfile {
    pub fn new(groups: Vec<Vec<f64>>) -> Result<Self> {
        let r = groups.first().map(Vec::len).unwrap_or(0);
        if r == 0 {
            return Err(Error::InvalidInput("profile needs at least one nonempty group".into()));
        }
        for g in &groups {
            if g.len() != r {
                return Err(Error::InvalidInput("all groups must have the same rank".into()));
            }
            if g.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
                return Err(Error::InvalidInput(format!("eigenvalues {g:?} must be positive")));
            }
            if g.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidInput(format!("eigenvalues {g:?} must be nonincreasing")));
            }
        }
        Ok(Self { groups })
    }

    /// `G` groups of `r` eigenvalues all equal to `level`.
    pub fn flat(g: usize, r: usize, level: f64) -> Result<Self> {
        Self::new(vec![vec![level; r]; g])
    }

    /// The same sorted profile repeated for `g` groups.
    pub fn repeated(g: usize, profile: &[f64]) -> Result<Self> {
        let mut p = profile.to_vec();
        p.sort_by(|a, b| b.total_cmp(a));
        Self::new(vec![p; g])
    }

    pub fn from_ensemble(e: &UnitaryEnsemble) -> Self {
        Self { groups: e.profiles() }
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn rank(&self) -> usize {
        self.groups[0].len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.groups.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        self.groups.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Uniform-boundedness ratio `ε = λ_min / λ_max ∈ (0, 1]`.
    pub fn epsilon(&self) -> f64 {
        self.lambda_min() / self.lambda_max()
    }

    /// `Σ_g log2 |Λ_g|`.
    pub fn log2_det_sum(&self) -> f64 {
        self.groups.iter().flatten().map(|l| l.log2()).sum()
    }

    fn check(&self, geo: &SystemGeometry) -> Result<()> {
        if self.num_groups() != geo.g || self.rank() != geo.r {
            return Err(Error::Domain(format!(
                "profile has {} groups of rank {}, geometry has G={} r={}",
                self.num_groups(),
                self.rank(),
                geo.g,
                geo.r
            )));
        }
        Ok(())
    }
}

/// High-SNR sandwich for the unitary-structure broadcast channel.
///
/// With `n = rG` active dimensions and flat level `ḡ = M / r`:
/// * `r < K'`: `center = n log(P/n) + Σ_g log|Λ_g| + κ(K', r)`,
///   `lower = center + n log(r/K')`.
/// * `r ≥ K'`: `center = K log(P ḡ / K) + κ(r, K')`,
///   `lower = center + Σ_g Σ_{i=1}^{K'} log(λ_{g,r-i+1} / ḡ)`.
///
/// In both regimes `upper = center`.
pub fn highsnr_bounds(geo: &SystemGeometry, profile: &EigenvalueProfile, p: f64) -> Result<BoundPair> {
    profile.check(geo)?;
    if !(p > 0.0) {
        return Err(Error::Domain(format!("SNR {p} must be positive")));
    }
    let (r, kp, g) = (geo.r, geo.k_prime, geo.g);
    let n = (r * g) as f64;
    if r < kp {
        let center = n * (p / n).log2() + profile.log2_det_sum() + kappa(kp, r, g)?;
        let lower = center + n * (r as f64 / kp as f64).log2();
        Ok(BoundPair::new(lower, center, center, Regime::RLtKprime))
    } else {
        let k = geo.k as f64;
        let gbar = geo.m as f64 / r as f64;
        let center = k * (p * gbar / k).log2() + kappa(r, kp, g)?;
        let offset: f64 = profile
            .groups()
            .iter()
            .map(|lam| (0..kp).map(|i| (lam[r - 1 - i] / gbar).log2()).sum::<f64>())
            .sum();
        Ok(BoundPair::new(center + offset, center, center, Regime::RGeKprime))
    }
}

/// i.i.d. Rayleigh high-SNR capacity `K log(P/K) + κ(M, K)` for `M ≥ K`.
pub fn iid_highsnr(m: usize, k: usize, p: f64) -> Result<f64> {
    if k == 0 || m < k {
        return Err(Error::Domain(format!("need M >= K >= 1 (M={m}, K={k})")));
    }
    Ok(k as f64 * (p / k as f64).log2() + kappa(m, k, 1)?)
}

/// Power-offset split for `r ≥ K'` (dB).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetDecomposition {
    pub eigen_beamforming_gain_db: f64,
    pub dimension_loss_db: f64,
}

/// `gain = (3/K) Σ_g Σ_{i≤K'} log λ_{g,i}`,
/// `loss = (3/K)(κ(r, K') - κ(M, K))`.
pub fn offset_decomposition(geo: &SystemGeometry, profile: &EigenvalueProfile) -> Result<OffsetDecomposition> {
    profile.check(geo)?;
    if geo.r < geo.k_prime {
        return Err(Error::Domain(format!("needs r >= K' (r={}, K'={})", geo.r, geo.k_prime)));
    }
    let k = geo.k as f64;
    let gain: f64 = profile
        .groups()
        .iter()
        .map(|lam| lam[..geo.k_prime].iter().map(|l| l.log2()).sum::<f64>())
        .sum();
    let loss = kappa(geo.r, geo.k_prime, geo.g)? - kappa(geo.m, geo.k, 1)?;
    Ok(OffsetDecomposition {
        eigen_beamforming_gain_db: 3.0 / k * gain,
        dimension_loss_db: 3.0 / k * loss,
    })
}

/// Large-`K` capacity `n log(P/n) + n log log K + Σ_g log|Λ_g|`, `n = rG`.
pub fn large_k_capacity(geo: &SystemGeometry, profile: &EigenvalueProfile, p: f64, k: usize) -> Result<f64> {
    profile.check(geo)?;
    if k < 2 {
        return Err(Error::Domain("needs K >= 2".into()));
    }
    if geo.r >= k / geo.g {
        return Err(Error::Domain(format!("needs r < K' (r={}, K'={})", geo.r, k / geo.g)));
    }
    let n = (geo.r * geo.g) as f64;
    Ok(n * (p / n).log2() + n * (k as f64).ln().log2() + profile.log2_det_sum())
}

/// Capacity with full cooperation inside each group,
/// `n log(P/n) + n log K' + Σ_g log|Λ_g|`.
pub fn intra_group_coop_capacity(geo: &SystemGeometry, profile: &EigenvalueProfile, p: f64) -> Result<f64> {
    profile.check(geo)?;
    let n = geo.r * geo.g;
    Ok(intra_group_coop_value(n, geo.k_prime as f64, profile.log2_det_sum(), p))
}

/// Same formula for a real-valued `K'`.
pub fn intra_group_coop_value(n: usize, k_prime: f64, log2_det_sum: f64, p: f64) -> f64 {
    let n = n as f64;
    n * (p / n).log2() + n * k_prime.log2() + log2_det_sum
}

/// Channel statistics behind a large-system ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LargeSystemPopulation {
    Iid,
    Correlated { g: usize, lambda_min: f64 },
}

/// `x log2(1/x)` with its limit 0 at `x = 0`.
pub(crate) fn xlog_inv(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// High-SNR capacity per antenna (`μ < 1`) or per user (`μ ≥ 1`) as
/// `M, K → ∞` with `μ = M/K`:
/// * `μ < 1`: `log(P/(eμ)) + ((1-μ)/μ) log(1/(1-μ))`
/// * `μ ≥ 1`: `log(μP/e) + (μ-1) log(μ/(μ-1))`
///
/// For correlated groups the lower end shifts by `log(μ λ_min / G)` or
/// `log(λ_min / G)` respectively.
pub fn large_system_ratio(mu: f64, p: f64, population: LargeSystemPopulation) -> Result<BoundPair> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("load ratio mu = {mu} must be positive")));
    }
    let center = if mu < 1.0 {
        (p / (E * mu)).log2() + xlog_inv(1.0 - mu) / mu
    } else {
        (mu * p / E).log2() + mu_excess_term(mu)
    };
    let lower = match population {
        LargeSystemPopulation::Iid => center,
        LargeSystemPopulation::Correlated { g, lambda_min } => {
            if !(lambda_min > 0.0) || g == 0 {
                return Err(Error::Domain("correlated population needs lambda_min > 0 and G >= 1".into()));
            }
            let scale = if mu < 1.0 { mu * lambda_min } else { lambda_min };
            center + (scale / g as f64).log2()
        }
    };
    Ok(BoundPair::new(lower, center, center, Regime::LargeSystem))
}

/// `(μ-1) log2(μ/(μ-1))`, zero at `μ = 1`.
pub(crate) fn mu_excess_term(mu: f64) -> f64 {
    if mu <= 1.0 {
        0.0
    } else {
        (mu - 1.0) * (mu / (mu - 1.0)).log2()
    }
}

/// One CSV row of bound output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub regime: String,
    pub parameters: String,
    pub lower: f64,
    pub upper: f64,
    pub center: f64,
}

impl BoundRow {
    pub fn new(bound: &BoundPair, parameters: impl Into<String>) -> Self {
        Self {
            regime: bound.regime.as_str().into(),
            parameters: parameters.into(),
            lower: bound.lower,
            upper: bound.upper,
            center: bound.center,
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::special::EULER_GAMMA;
    use std::f64::consts::LOG2_E;

    fn geo(m: usize, k: usize, g: usize, r: usize) -> SystemGeometry {
        SystemGeometry::new(m, k, g, r, 100).unwrap()
    }

    #[test]
    fn iid_consistency_at_r_eq_kprime() {
        let g = geo(6, 6, 1, 6);
        let prof = EigenvalueProfile::flat(1, 6, 1.0).unwrap();
        let b = highsnr_bounds(&g, &prof, 1e3).unwrap();
        let iid = iid_highsnr(6, 6, 1e3).unwrap();
        assert!((b.lower - iid).abs() < 1e-12 && (b.upper - iid).abs() < 1e-12);
        assert_eq!(b.regime, Regime::RGeKprime);
    }

    #[test]
    fn r_lt_kprime_gap() {
        let g = geo(8, 32, 4, 2);
        let prof = EigenvalueProfile::repeated(4, &[7.0, 1.0]).unwrap();
        let b = highsnr_bounds(&g, &prof, 100.0).unwrap();
        assert!((b.width() - 8.0 * (8f64 / 2.0).log2()).abs() < 1e-12);
        assert_eq!(b.regime, Regime::RLtKprime);
    }

    #[test]
    fn worked_example_m8() {
        let g = geo(8, 8, 4, 2);
        let prof = EigenvalueProfile::flat(4, 2, 4.0).unwrap();
        let b = highsnr_bounds(&g, &prof, 1000.0).unwrap();
        let expect = 8.0 * 500f64.log2() + 8.0 * (0.5 - EULER_GAMMA) * LOG2_E;
        assert!((b.upper - expect).abs() < 1e-12);
        assert!((b.lower - b.upper).abs() < 1e-12);
    }

    #[test]
    fn tall_ensemble_is_ordered() {
        let g = geo(16, 8, 4, 2);
        for prof in [vec![8.0, 8.0], vec![12.0, 4.0]] {
            let b = highsnr_bounds(&g, &EigenvalueProfile::repeated(4, &prof).unwrap(), 100.0).unwrap();
            assert!(b.lower <= b.upper + 1e-12, "{prof:?}: {b:?}");
        }
    }

    #[test]
    fn iid_scalar() {
        let v = iid_highsnr(1, 1, 100.0).unwrap();
        assert!((v - (100f64.log2() - EULER_GAMMA * LOG2_E)).abs() < 1e-12);
        assert!(iid_highsnr(2, 3, 1.0).is_err());
        let slope = iid_highsnr(4, 2, 2000.0).unwrap() - iid_highsnr(4, 2, 1000.0).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn offsets() {
        let g = geo(8, 8, 4, 2);
        let flat = EigenvalueProfile::flat(4, 2, 4.0).unwrap();
        let d = offset_decomposition(&g, &flat).unwrap();
        assert!((d.eigen_beamforming_gain_db - 3.0 * 4f64.log2()).abs() < 1e-12);
        let skew = EigenvalueProfile::repeated(4, &[7.0, 1.0]).unwrap();
        assert!(offset_decomposition(&g, &skew).unwrap().eigen_beamforming_gain_db < d.eigen_beamforming_gain_db);
        let iid = offset_decomposition(&geo(4, 4, 1, 4), &EigenvalueProfile::flat(1, 4, 1.0).unwrap()).unwrap();
        assert!(iid.eigen_beamforming_gain_db.abs() < 1e-12 && iid.dimension_loss_db.abs() < 1e-12);
        assert!(offset_decomposition(&geo(8, 32, 4, 2), &flat).is_err());
    }

    #[test]
    fn large_k_flat_offset() {
        let p = 10.0;
        let iid = large_k_capacity(&geo(4, 2048, 1, 4), &EigenvalueProfile::flat(1, 4, 1.0).unwrap(), p, 2048).unwrap();
        let cor = large_k_capacity(&geo(4, 2048, 2, 2), &EigenvalueProfile::flat(2, 2, 2.0).unwrap(), p, 2048).unwrap();
        assert!((cor - iid - 4.0).abs() < 1e-12);
        assert!(large_k_capacity(&geo(4, 2048, 1, 4), &EigenvalueProfile::flat(1, 4, 1.0).unwrap(), p, 1).is_err());
    }

    #[test]
    fn coop_coincides_with_large_k_at_log_k() {
        let k = 4096usize;
        let prof = EigenvalueProfile::flat(2, 2, 2.0).unwrap();
        let lk = large_k_capacity(&geo(4, k, 2, 2), &prof, 10.0, k).unwrap();
        let coop = intra_group_coop_value(4, (k as f64).ln(), prof.log2_det_sum(), 10.0);
        assert!((lk - coop).abs() < 1e-12);
    }

    #[test]
    fn large_system_values() {
        let p = 1000.0;
        let one = large_system_ratio(1.0, p, LargeSystemPopulation::Iid).unwrap();
        assert!((one.center - (p / E).log2()).abs() < 1e-12);
        let two = large_system_ratio(2.0, p, LargeSystemPopulation::Iid).unwrap();
        assert!((two.center - ((2.0 * p / E).log2() + 1.0)).abs() < 1e-12);
        let below = large_system_ratio(1.0 - 1e-9, p, LargeSystemPopulation::Iid).unwrap();
        let above = large_system_ratio(1.0 + 1e-9, p, LargeSystemPopulation::Iid).unwrap();
        assert!((below.center - above.center).abs() < 1e-6);
        let cor = large_system_ratio(
            0.5,
            p,
            LargeSystemPopulation::Correlated {
                g: 4,
                lambda_min: 1.0,
            },
        )
        .unwrap();
        assert!(cor.lower <= cor.upper);
        assert!(large_system_ratio(0.0, p, LargeSystemPopulation::Iid).is_err());
    }
}
