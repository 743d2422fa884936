use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::SystemGeometry;
use crate::channel_models::GroupEigenStructure;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rng::stream_rng;
use crate::stats::mean_and_std_error;

/// Largest tolerated pilot leakage between groups, relative to the
/// training amplitude.
pub const LEAKAGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Downlink common pilot `X = ρ Σ_g U_g`, `r` symbols.
    FddPrebeamformed,
    /// Uplink dedicated pilot with receive beamformers `U_g^H`, `K'` symbols.
    TddReciprocal,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::FddPrebeamformed => "fdd_prebeamformed",
            Scheme::TddReciprocal => "tdd_reciprocal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingOptions {
    pub trials: usize,
    /// Per-entry variance of the receiver noise; 0 gives noiseless pilots.
    pub noise_variance: f64,
}

impl Default for TrainingOptions {
    fn default() -> Self {
        Self {
            trials: 1,
            noise_variance: 1.0,
        }
    }
}

/// Effective channel `U_g^H H_g` (`r x K'`) of one group and its estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupEstimate {
    pub truth: CMatrix,
    pub estimate: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub scheme: Scheme,
    pub symbols_consumed: usize,
    pub baseline_symbols: usize,
    /// Mean squared error per complex entry, averaged over trials.
    pub mse_per_entry: f64,
    pub mse_std_error: f64,
    /// `σ² / ρ²`.
    pub expected_mse: f64,
    /// Mean estimation error per entry (unbiasedness check).
    pub mean_error: Complex64,
    pub max_leakage: f64,
    pub per_trial_mse: Vec<f64>,
    /// Estimates from the first trial.
    pub first_trial: Vec<GroupEstimate>,
}

/// One CSV row of per-trial training error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRow {
    pub scheme: String,
    pub trial: usize,
    pub rho_tr: f64,
    pub mse: f64,
}

impl TrainingReport {
    pub fn rows(&self, rho_tr: f64) -> Vec<TrainingRow> {
        self.per_trial_mse
            .iter()
            .enumerate()
            .map(|(trial, &mse)| TrainingRow {
                scheme: self.scheme.as_str().into(),
                trial,
                rho_tr,
                mse,
            })
            .collect()
    }
}

struct TrialOutcome {
    mse: f64,
    err_sum: Complex64,
    leakage: f64,
    estimates: Vec<GroupEstimate>,
}

fn noise(rng: &mut crate::rng::StreamRng, rows: usize, cols: usize, var: f64) -> CMatrix {
    let z = linalg::complex_gaussian(rng, rows, cols);
    if var == 1.0 {
        z
    } else {
        z * Complex64::new(var.sqrt(), 0.0)
    }
}

/// Simulates pilot training with the pre-beamformed common pilot (FDD) or
/// beamformed uplink pilots (TDD) and least-squares estimation of each
/// group's effective channel. Group `g` holds users `g·K' .. (g+1)·K'`.
///
/// Fails with a structure violation when the group eigenspaces leak into
/// each other's pilots.
pub fn simulate_training(
    groups: &[GroupEigenStructure],
    geometry: &SystemGeometry,
    rho_tr: f64,
    noise_seed: u64,
    scheme: Scheme,
    opts: TrainingOptions,
) -> Result<TrainingReport> {
    if !(rho_tr > 0.0 && rho_tr.is_finite()) {
        return Err(Error::InvalidInput(format!("training power {rho_tr} must be positive")));
    }
    if opts.trials == 0 || !(opts.noise_variance >= 0.0) {
        return Err(Error::InvalidInput("need at least one trial and nonnegative noise".into()));
    }
    if groups.len() != geometry.g || groups.iter().any(|g| g.dim() != geometry.m || g.rank() != geometry.r) {
        return Err(Error::Geometry("groups do not match the system geometry".into()));
    }
    let (m, r, kp) = (geometry.m, geometry.r, geometry.k_prime);
    let factors: Vec<CMatrix> = groups.iter().map(|g| g.factor()).collect();
    let rho = Complex64::new(rho_tr, 0.0);
    let pilot: CMatrix = groups.iter().fold(CMatrix::zeros(m, r), |acc, g| acc + g.basis()) * rho;

    let outcomes: Vec<TrialOutcome> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(noise_seed, t as u64);
            let channels: Vec<CMatrix> = factors
                .iter()
                .map(|f| f * linalg::complex_gaussian(&mut rng, r, kp))
                .collect();
            let mut leakage = 0.0f64;
            let mut estimates = Vec::with_capacity(groups.len());
            match scheme {
                Scheme::FddPrebeamformed => {
                    for (grp, h) in groups.iter().zip(&channels) {
                        // received K' x r block: H_g^H X + Z_g
                        let y = h.adjoint() * &pilot + noise(&mut rng, kp, r, opts.noise_variance);
                        let estimate = (y / rho).adjoint();
                        let truth = grp.basis().adjoint() * h;
                        let others = &pilot - grp.basis() * rho;
                        let leak = linalg::max_abs(&(h.adjoint() * others)) / rho_tr;
                        let scale = linalg::max_abs(h).max(f64::MIN_POSITIVE);
                        leakage = leakage.max(leak / scale);
                        estimates.push(GroupEstimate { truth, estimate });
                    }
                }
                Scheme::TddReciprocal => {
                    // user j of every group sends on symbol j
                    let sum_h = channels.iter().fold(CMatrix::zeros(m, kp), |acc, h| acc + h);
                    let y = sum_h * rho + noise(&mut rng, m, kp, opts.noise_variance);
                    for (gi, (grp, h)) in groups.iter().zip(&channels).enumerate() {
                        let estimate = grp.basis().adjoint() * &y / rho;
                        let truth = grp.basis().adjoint() * h;
                        for (hi, other) in channels.iter().enumerate() {
                            if hi != gi {
                                let scale = linalg::max_abs(other).max(f64::MIN_POSITIVE);
                                leakage = leakage.max(linalg::max_abs(&(grp.basis().adjoint() * other)) / scale);
                            }
                        }
                        estimates.push(GroupEstimate { truth, estimate });
                    }
                }
            }
            let mut sq = 0.0;
            let mut err_sum = Complex64::new(0.0, 0.0);
            let mut n = 0usize;
            for e in &estimates {
                for (a, b) in e.estimate.iter().zip(e.truth.iter()) {
                    let d = a - b;
                    sq += d.norm_sqr();
                    err_sum += d;
                    n += 1;
                }
            }
            TrialOutcome {
                mse: sq / n as f64,
                err_sum: err_sum / n as f64,
                leakage,
                estimates,
            }
        })
        .collect();

    let max_leakage = outcomes.iter().map(|o| o.leakage).fold(0.0, f64::max);
    if max_leakage > LEAKAGE_TOL {
        return Err(Error::StructureViolation(format!(
            "inter-group pilot leakage {max_leakage:.3e} above {LEAKAGE_TOL:e}"
        )));
    }
    let per_trial_mse: Vec<f64> = outcomes.iter().map(|o| o.mse).collect();
    let (mse, se) = mean_and_std_error(&per_trial_mse);
    let mean_error = outcomes.iter().map(|o| o.err_sum).sum::<Complex64>() / opts.trials as f64;
    let (symbols_consumed, baseline_symbols) = super::dimensioning::pilot_symbols(geometry, scheme);
    let first_trial = outcomes.into_iter().next().map(|o| o.estimates).unwrap_or_default();
    Ok(TrainingReport {
        scheme,
        symbols_consumed,
        baseline_symbols,
        mse_per_entry: mse,
        mse_std_error: se,
        expected_mse: opts.noise_variance / (rho_tr * rho_tr),
        mean_error,
        max_leakage,
        per_trial_mse,
        first_trial,
    })
}
