use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::types::{CovarianceMatrix, OneRingParams};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::GaussLegendre;

/// Angular spreads below this are treated as a single plane wave.
pub const DEGENERATE_SPREAD: f64 = 1e-9;

const NODES: usize = 64;
/// Phase excursion (radians) allotted to one 64-node panel initially.
const PHASE_PER_PANEL: f64 = 16.0;
const MAX_PANELS: usize = 1 << 14;
const AGREEMENT_TOL: f64 = 1e-9;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NODES))
}

/// Correlation between two elements `lag` positions apart:
/// `(1/2Δ) ∫_{-Δ}^{Δ} exp(j 2π D lag sin(ω + θ)) dω`.
///
/// Composite 64-node Gauss–Legendre; the panel count starts from the
/// phase excursion of the integrand and doubles until two successive
/// panel counts agree to 1e-9.
pub fn one_ring_lag(params: &OneRingParams, lag: i64) -> Result<Complex64> {
    if lag == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let k = 2.0 * PI * params.spacing * lag as f64;
    if params.delta < DEGENERATE_SPREAD {
        return Ok(Complex64::from_polar(1.0, k * params.theta.sin()));
    }
    let (theta, delta) = (params.theta, params.delta);
    let f = |w: f64| Complex64::from_polar(1.0, k * (w + theta).sin());
    let excursion = k.abs() * 2.0 * delta;
    let mut panels = ((excursion / PHASE_PER_PANEL).ceil() as usize).max(1);
    let mut coarse: Complex64 = rule().integrate(f, -delta, delta, panels);
    loop {
        let fine: Complex64 = rule().integrate(f, -delta, delta, 2 * panels);
        if (fine - coarse).norm() <= AGREEMENT_TOL * 2.0 * delta {
            return Ok(fine / (2.0 * delta));
        }
        panels *= 2;
        if panels > MAX_PANELS {
            return Err(Error::Integration(format!(
                "one-ring lag {lag} did not settle with {MAX_PANELS} panels"
            )));
        }
        coarse = fine;
    }
}

/// Toeplitz one-ring covariance with unit diagonal (hence `tr R = M`).
pub fn one_ring_covariance(params: &OneRingParams) -> Result<CovarianceMatrix> {
    params.validate()?;
    let m = params.num_antennas;
    let lags: Vec<Complex64> = (0..m as i64)
        .map(|n| one_ring_lag(params, n))
        .collect::<Result<_>>()?;
    let mut r = CMatrix::zeros(m, m);
    for p in 0..m {
        for q in 0..m {
            r[(p, q)] = if p >= q { lags[p - q] } else { lags[q - p].conj() };
        }
    }
    Ok(CovarianceMatrix::from_parts_unchecked(r, true))
}
