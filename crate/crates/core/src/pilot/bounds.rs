use std::collections::BTreeMap;
use std::f64::consts::{E, LOG2_E};

use serde::{Deserialize, Serialize};

use super::dimensioning::q_star;
use crate::asymptotics::{harmonic_range, mu_excess_term, xlog_inv, BoundPair, EigenvalueProfile, Regime, EULER_GAMMA};
use crate::capacity::SystemGeometry;
use crate::error::{Error, Result};

fn check_profile(geo: &SystemGeometry, profile: &EigenvalueProfile) -> Result<()> {
    if profile.num_groups() != geo.g || profile.rank() != geo.r {
        return Err(Error::Domain(format!(
            "profile has {} groups of rank {}, geometry has G={} r={}",
            profile.num_groups(),
            profile.rank(),
            geo.g,
            geo.r
        )));
    }
    Ok(())
}

fn pilot_bound(lower: f64, center: f64) -> BoundPair {
    BoundPair {
        lower,
        upper: center,
        center,
        regime: Regime::Pilot,
        flags: Vec::new(),
    }
}

/// Training discount `1 - q*/Tc`, after checking `q* ≥ 1`.
fn discount(geo: &SystemGeometry) -> Result<(usize, f64)> {
    let q = q_star(geo.r, geo.k_prime, geo.tc);
    if q == 0 {
        return Err(Error::Domain(format!("Tc = {} leaves no room for training", geo.tc)));
    }
    Ok((q, 1.0 - q as f64 / geo.tc as f64))
}

/// Pilot-aided system I, many groups of fixed size: capacity per stream
/// `C/M*` with `μ_p1 = q*/K'`. For `μ = M/K < 1`
/// `center = (1-q*/Tc){log(P/q*) + log e(-γ + Σ_{ℓ=2}^{K'} 1/ℓ
/// + ((1-μ_p1)/μ_p1) Σ_{ℓ=(1-μ_p1)K'+1}^{K'} 1/ℓ)}` and the lower end is
/// shifted by `(1-q*/Tc) log(μ_p1 ε)`; for `μ ≥ 1` the last harmonic term
/// is absent and the shift is `(1-q*/Tc) log ε`.
pub fn pilot_bound_large_g(geo: &SystemGeometry, profile: &EigenvalueProfile, p: f64) -> Result<BoundPair> {
    check_profile(geo, profile)?;
    let (q, d) = discount(geo)?;
    let kp = geo.k_prime;
    let mu_p1 = q as f64 / kp as f64;
    let eps = profile.epsilon();
    let mut brace = (p / q as f64).log2() + LOG2_E * (-EULER_GAMMA + harmonic_range(2, kp));
    let shift = if geo.mu() < 1.0 {
        // (1 - μ_p1) K' = K' - q* is an integer here
        brace += LOG2_E * (1.0 - mu_p1) / mu_p1 * harmonic_range(kp - q + 1, kp);
        d * (mu_p1 * eps).log2()
    } else {
        d * eps.log2()
    };
    let center = d * brace;
    Ok(pilot_bound(center + shift, center))
}

/// Pilot-aided system I with few large groups (`μ_p1 = q*/K' ≤ 1`):
/// `center = (1-q*/Tc){log(P/(e μ_p1)) + ((1-μ_p1)/μ_p1) log(1/(1-μ_p1))}`,
/// lower end shifted by `(1-q*/Tc) log(μ_p1 ε)`.
pub fn pilot_bound_large_r(geo: &SystemGeometry, profile: &EigenvalueProfile, p: f64) -> Result<BoundPair> {
    check_profile(geo, profile)?;
    let (q, d) = discount(geo)?;
    let mu_p1 = q as f64 / geo.k_prime as f64;
    if mu_p1 > 1.0 {
        return Err(Error::Domain(format!("mu_p1 = {mu_p1} exceeds 1")));
    }
    let center = d * ((p / (E * mu_p1)).log2() + xlog_inv(1.0 - mu_p1) / mu_p1);
    Ok(pilot_bound(center + d * (mu_p1 * profile.epsilon()).log2(), center))
}

/// Per-stream limit `(1 - 1/Tc) log(P/e)` for vanishing angular spread at
/// `μ = 1`.
pub fn corollary_vanishing_spread(p: f64, tc: usize) -> f64 {
    (1.0 - 1.0 / tc as f64) * (p / E).log2()
}

/// Pilot-aided system II (`μ_p2 = M_p2*/K > 1`), capacity per user:
/// `center = (1 - M_p2*/(Tc G)){log(μ_p2 P/e) + (μ_p2-1) log(μ_p2/(μ_p2-1)) + c}`
/// with lower end shifted by `(1 - M_p2*/(Tc G)) log(λ_min/G)`. The
/// additive constant `c` is not known in closed form; `None` uses 0 and
/// flags the result.
pub fn pilot_bound_system2(
    geo: &SystemGeometry,
    profile: &EigenvalueProfile,
    p: f64,
    m_p2_star: usize,
    c_p2: Option<f64>,
) -> Result<BoundPair> {
    check_profile(geo, profile)?;
    let mu_p2 = m_p2_star as f64 / geo.k as f64;
    if mu_p2 <= 1.0 {
        return Err(Error::Domain(format!("mu_p2 = {mu_p2} must exceed 1")));
    }
    let d = 1.0 - m_p2_star as f64 / (geo.tc * geo.g) as f64;
    let center = d * ((mu_p2 * p / E).log2() + mu_excess_term(mu_p2) + c_p2.unwrap_or(0.0));
    let lower = center + d * (profile.lambda_min() / geo.g as f64).log2();
    let mut b = pilot_bound(lower, center);
    if c_p2.is_none() {
        b.flags.push("c_p2_2 unspecified, taken as 0".into());
    }
    Ok(b)
}

/// Result of the system-II eigenmode search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct System2Optimum {
    /// Eigenmodes per group.
    pub q_opt: usize,
    /// `M_p2* = q_opt · G`.
    pub m_p2_star: usize,
    /// Streams of system I, `M* = q* G`.
    pub m_star: usize,
    pub q_star: usize,
    pub profile: BTreeMap<usize, f64>,
}

/// `f(q) = M*(1 - q/Tc){log((P/e)(q/K')) + (q/K' - 1) log(q/(q-K'))}` for
/// real `q ≥ K'`; the second term is 0 at `q = K'`.
pub fn system2_objective(q: f64, k_prime: usize, tc: usize, m_star: usize, p: f64) -> f64 {
    let x = q / k_prime as f64;
    m_star as f64 * (1.0 - q / tc as f64) * ((p / E * x).log2() + mu_excess_term(x))
}

/// Exhaustive search of `f(q)` over `max(q*, K') ≤ q ≤ r`; ties go to the
/// smaller `q`.
pub fn system2_optimize(geo: &SystemGeometry, p: f64) -> Result<System2Optimum> {
    if geo.mu() <= 1.0 {
        return Err(Error::Domain(format!("system II needs M > K (mu = {})", geo.mu())));
    }
    let qs = q_star(geo.r, geo.k_prime, geo.tc);
    let m_star = qs * geo.g;
    let lo = qs.max(geo.k_prime);
    if lo > geo.r || qs == 0 {
        return Err(Error::Domain(format!(
            "no feasible eigenmode count in [{lo}, {}]",
            geo.r
        )));
    }
    let mut profile = BTreeMap::new();
    let mut best = (lo, f64::NEG_INFINITY);
    for q in lo..=geo.r {
        let f = system2_objective(q as f64, geo.k_prime, geo.tc, m_star, p);
        profile.insert(q, f);
        if f > best.1 {
            best = (q, f);
        }
    }
    Ok(System2Optimum {
        q_opt: best.0,
        m_p2_star: best.0 * geo.g,
        m_star,
        q_star: qs,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(m: usize, k: usize, g: usize, tc: usize) -> SystemGeometry {
        SystemGeometry::symmetric(m, k, g, tc).unwrap()
    }

    #[test]
    fn large_r_limit_case() {
        // μ_p1 = 1: q* = K' = 10
        let g = geo(200, 100, 10, 50);
        let prof = EigenvalueProfile::flat(10, 20, 10.0).unwrap();
        let b = pilot_bound_large_r(&g, &prof, 1000.0).unwrap();
        let d = 1.0 - 10.0 / 50.0;
        assert!((b.center - d * (1000.0 / E).log2()).abs() < 1e-12);
        assert!((b.lower - b.center).abs() < 1e-12);
    }

    #[test]
    fn large_r_matches_vanishing_spread_limit() {
        let g = geo(8, 8, 8, 20);
        let prof = EigenvalueProfile::flat(8, 1, 1.0).unwrap();
        let b = pilot_bound_large_r(&g, &prof, 1e4).unwrap();
        assert!((b.center - corollary_vanishing_spread(1e4, 20)).abs() < 1e-12);
    }

    #[test]
    fn large_g_single_user_groups() {
        // r = K' = 1: the harmonic bracket reduces to -γ
        let g = geo(8, 8, 8, 20);
        let prof = EigenvalueProfile::flat(8, 1, 1.0).unwrap();
        let b = pilot_bound_large_g(&g, &prof, 1e4).unwrap();
        let expect = (1.0 - 1.0 / 20.0) * (1e4f64.log2() - EULER_GAMMA * LOG2_E);
        assert!((b.center - expect).abs() < 1e-12);
    }

    #[test]
    fn large_g_small_mu_includes_third_term() {
        // M=40, K=80, G=10: r=4, K'=8, q*=4, μ_p1 = 1/2
        let g = geo(40, 80, 10, 50);
        let prof = EigenvalueProfile::flat(10, 4, 10.0).unwrap();
        let b = pilot_bound_large_g(&g, &prof, 1000.0).unwrap();
        let d = 1.0 - 4.0 / 50.0;
        let h = harmonic_range(2, 8);
        let third = 1.0 * harmonic_range(5, 8);
        let expect = d * ((1000.0f64 / 4.0).log2() + LOG2_E * (-EULER_GAMMA + h + third));
        assert!((b.center - expect).abs() < 1e-12);
        assert!((b.lower - (b.center + d * 0.5f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn system2_flags_and_domain() {
        let g = geo(200, 100, 10, 128);
        let prof = EigenvalueProfile::flat(10, 20, 10.0).unwrap();
        let b = pilot_bound_system2(&g, &prof, 1000.0, 140, None).unwrap();
        assert_eq!(b.flags.len(), 1);
        assert!(b.lower <= b.upper);
        assert!(pilot_bound_system2(&g, &prof, 1000.0, 100, None).is_err());
        let one = EigenvalueProfile::flat(1, 20, 1.0).unwrap();
        let g1 = geo(20, 10, 1, 128);
        let b1 = pilot_bound_system2(&g1, &one, 1000.0, 15, Some(0.0)).unwrap();
        assert!((b1.lower - b1.upper).abs() < 1e-12 && b1.flags.is_empty());
    }

    #[test]
    fn system2_fig_presets_exceed_system1_streams() {
        for k in [100, 40] {
            let g = geo(200, k, 10, 64);
            let opt = system2_optimize(&g, 1000.0).unwrap();
            assert!(opt.m_p2_star > opt.m_star, "K={k}: {opt:?}");
        }
    }

    #[test]
    fn objective_limit_at_k_prime() {
        let at = system2_objective(10.0, 10, 64, 100, 1000.0);
        let near = system2_objective(10.0 + 1e-9, 10, 64, 100, 1000.0);
        assert!((at - near).abs() < 1e-6);
    }

    #[test]
    fn system2_needs_more_antennas() {
        assert!(system2_optimize(&geo(8, 8, 4, 64), 100.0).is_err());
    }
}
