use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::types::OneRingParams;
use crate::error::{Error, Result};
use crate::quadrature::tanh_sinh;

const QUAD_TOL: f64 = 1e-10;

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Eigenvalue spectrum `S(ξ)` of a Toeplitz covariance on `ξ ∈ [-1/2, 1/2]`
/// together with its support and the points where it is singular or
/// discontinuous.
#[derive(Clone)]
pub struct EigenvalueSpectrum {
    density: Density,
    support: Vec<(f64, f64)>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for EigenvalueSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenvalueSpectrum")
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

/// `∫ log2 S` over the support, and the same value divided by the support
/// measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzegoRate {
    pub raw_bits: f64,
    pub normalized_bits: f64,
    pub support_measure: f64,
}

impl EigenvalueSpectrum {
    /// `support` is a list of disjoint intervals inside `[-1/2, 1/2]`;
    /// `breakpoints` are interior points where quadrature panels must be
    /// split.
    pub fn new<F>(density: F, support: Vec<(f64, f64)>, breakpoints: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        for &(a, b) in &support {
            if !(-0.5 <= a && a <= b && b <= 0.5) {
                return Err(Error::InvalidInput(format!("support interval [{a}, {b}] outside the band")));
            }
        }
        let support = merge_intervals(support);
        Ok(Self {
            density: Arc::new(density),
            support,
            breakpoints,
        })
    }

    /// `S ≡ level` on `support`.
    pub fn constant(level: f64, support: Vec<(f64, f64)>) -> Result<Self> {
        let sup = support.clone();
        Self::new(
            move |x| {
                if sup.iter().any(|&(a, b)| a <= x && x <= b) {
                    level
                } else {
                    0.0
                }
            },
            support,
            Vec::new(),
        )
    }

    pub fn density(&self, xi: f64) -> f64 {
        (self.density)(xi)
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    pub fn support_measure(&self) -> f64 {
        self.support.iter().map(|(a, b)| b - a).sum()
    }

    /// Quadrature panels covering the support, split at every breakpoint.
    fn panels(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &(a, b) in &self.support {
            let mut cuts: Vec<f64> = self
                .breakpoints
                .iter()
                .copied()
                .filter(|&x| x > a && x < b)
                .collect();
            cuts.push(a);
            cuts.push(b);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
            out.extend(cuts.windows(2).map(|w| (w[0], w[1])).filter(|(l, h)| h > l));
        }
        out
    }

    fn integrate_over_support<F: Fn(f64) -> f64>(&self, g: F) -> Result<f64> {
        let mut total = 0.0;
        for (a, b) in self.panels() {
            total += tanh_sinh(|x, _, _| g(x), a, b, QUAD_TOL)?;
        }
        Ok(total)
    }

    /// `∫ S(ξ) dξ`; equals the diagonal coefficient `r_0`.
    pub fn total_mass(&self) -> Result<f64> {
        self.integrate_over_support(|x| self.density(x))
    }
}

fn merge_intervals(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.retain(|(a, b)| b > a);
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Number of angles `φ ∈ [lo, hi]` (within `[-π, π]`) with `sin φ = y`.
fn preimage_count(y: f64, lo: f64, hi: f64) -> usize {
    let base = y.asin();
    [base, PI - base, -PI - base]
        .iter()
        .filter(|&&phi| phi >= lo && phi <= hi)
        .count()
}

/// Spectrum of the one-ring covariance:
/// `S(ξ) = (1/2Δ) Σ_k n_k(ξ) / sqrt(D² - (k-ξ)²)`, where `n_k(ξ)` counts the
/// angles in `[θ-Δ, θ+Δ]` with `D sin φ = k - ξ` (one angle whenever the
/// angular range stays on one side of end-fire).
pub fn one_ring_spectrum(params: &OneRingParams) -> Result<EigenvalueSpectrum> {
    params.validate()?;
    let OneRingParams {
        theta,
        delta,
        spacing: d,
        ..
    } = *params;
    let (lo_phi, hi_phi) = (theta - delta, theta + delta);
    let (ymin, ymax) = params.projected_range();

    let density = move |xi: f64| -> f64 {
        let kmin = (xi - d).ceil() as i64;
        let kmax = (xi + d).floor() as i64;
        let mut s = 0.0;
        for k in kmin..=kmax {
            let y = k as f64 - xi;
            let rad = d * d - y * y;
            if rad <= 0.0 || y < ymin || y > ymax {
                continue;
            }
            let n = preimage_count(y / d, lo_phi, hi_phi);
            if n > 0 {
                s += n as f64 / rad.sqrt();
            }
        }
        s / (2.0 * delta)
    };

    let kspan = d.ceil() as i64 + 1;
    let mut support = Vec::new();
    let mut breakpoints = Vec::new();
    let special = [ymin, ymax, d * lo_phi.sin(), d * hi_phi.sin(), d, -d];
    for k in -kspan..=kspan {
        let kf = k as f64;
        let (a, b) = ((kf - ymax).max(-0.5), (kf - ymin).min(0.5));
        if b > a {
            support.push((a, b));
        }
        for y in special {
            let x = kf - y;
            if (-0.5..=0.5).contains(&x) {
                breakpoints.push(x);
            }
        }
    }
    EigenvalueSpectrum::new(density, support, breakpoints)
}

/// Szegő rate `∫_{supp S} log2 S(ξ) dξ` and its support-normalised version.
/// For full-support spectra the raw value is `lim (1/M) log2 det R_M`.
pub fn szego_logdet_rate(spectrum: &EigenvalueSpectrum) -> Result<SzegoRate> {
    let rho = spectrum.support_measure();
    if rho <= 1e-12 {
        return Err(Error::DegenerateSpectrum("spectrum support has zero measure".into()));
    }
    let raw = spectrum.integrate_over_support(|x| {
        let s = spectrum.density(x);
        if s > 0.0 {
            s.log2()
        } else {
            f64::NAN
        }
    })?;
    Ok(SzegoRate {
        raw_bits: raw,
        normalized_bits: raw / rho,
        support_measure: rho,
    })
}
