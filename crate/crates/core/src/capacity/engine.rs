use std::f64::consts::LN_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::SystemGeometry;
use super::waterfill::{waterfill_blocks, DEFAULT_MAX_ITER, DEFAULT_TOL_BITS};
use crate::channel_models::{one_ring_covariance, GroupEigenStructure, OneRingParams, UnitaryEnsemble};
use crate::db_to_linear;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rng::{stream_rng, StreamRng};
use crate::stats::mean_and_std_error;

/// Fraction of failed trials above which a run is aborted.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// How user covariances are produced. Users are assigned to groups
/// round-robin: user `k` belongs to group `k mod G`.
#[derive(Debug, Clone)]
pub enum UserPopulation {
    /// `R = I` for every user.
    Iid,
    /// Groups of a unitary-structure ensemble.
    Unitary(UnitaryEnsemble),
    /// Arbitrary fixed group covariances (no orthogonality assumed).
    Correlated(Vec<GroupEigenStructure>),
    /// Every user draws its own one-ring covariance in every trial, with
    /// angle of departure and spread uniform on the given ranges (radians).
    OneRingRandom {
        theta_range: (f64, f64),
        delta_range: (f64, f64),
        spacing: f64,
    },
}

impl UserPopulation {
    fn num_groups(&self) -> usize {
        match self {
            UserPopulation::Unitary(e) => e.num_groups(),
            UserPopulation::Correlated(g) => g.len(),
            _ => 1,
        }
    }

    fn check_dim(&self, m: usize) -> Result<()> {
        let bad = match self {
            UserPopulation::Unitary(e) => e.dim() != m,
            UserPopulation::Correlated(g) => g.is_empty() || g.iter().any(|x| x.dim() != m),
            UserPopulation::OneRingRandom {
                theta_range,
                delta_range,
                spacing,
            } => {
                // validates the extreme corners of the draw box
                for (t, d) in [(theta_range.0, delta_range.0), (theta_range.1, delta_range.1)] {
                    OneRingParams::new(t, d, *spacing, m)?;
                }
                theta_range.0 > theta_range.1 || delta_range.0 > delta_range.1
            }
            UserPopulation::Iid => false,
        };
        if bad {
            return Err(Error::InvalidInput(format!("population does not match M = {m}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Waterfill over the full `M x K` channel.
    Full,
    /// Waterfill over the `r x K'` effective channels `Λ_g^{1/2} W_g`.
    PerGroup,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::PerGroup => "per_group",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterfillOptions {
    pub tol_bits: f64,
    pub max_iter: usize,
}

impl Default for WaterfillOptions {
    fn default() -> Self {
        Self {
            tol_bits: DEFAULT_TOL_BITS,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub mean_bps_hz: f64,
    pub std_error: f64,
    pub trials: usize,
    pub snr_db: f64,
    /// Trials whose waterfilling hit the iteration cap; their best
    /// allocation still enters the mean.
    pub failed_trials: usize,
}

impl CapacityEstimate {
    /// Half-width of the normal-approximation confidence interval at
    /// `z` standard errors.
    pub fn half_width(&self, z: f64) -> f64 {
        z * self.std_error
    }
}

/// Channel of one trial: the full matrix, or its per-group reductions.
fn draw_trial(pop: &UserPopulation, m: usize, k: usize, mode: Mode, rng: &mut StreamRng) -> Result<Vec<CMatrix>> {
    match (pop, mode) {
        (UserPopulation::Iid, _) => Ok(vec![linalg::complex_gaussian(rng, m, k)]),
        (UserPopulation::Unitary(ens), _) => {
            let g = ens.num_groups();
            let r = ens.rank();
            // W is drawn user by user so both modes see the same innovations
            let w = linalg::complex_gaussian(rng, r, k);
            match mode {
                Mode::Full => {
                    let factors: Vec<CMatrix> = ens.groups().iter().map(|x| x.factor()).collect();
                    let mut h = CMatrix::zeros(m, k);
                    for u in 0..k {
                        h.set_column(u, &(&factors[u % g] * w.column(u)));
                    }
                    Ok(vec![h])
                }
                Mode::PerGroup => Ok(ens
                    .groups()
                    .iter()
                    .enumerate()
                    .map(|(gi, grp)| {
                        let users: Vec<usize> = (gi..k).step_by(g).collect();
                        let mut b = CMatrix::zeros(r, users.len());
                        for (j, &u) in users.iter().enumerate() {
                            for (i, lam) in grp.eigenvalues().iter().enumerate() {
                                b[(i, j)] = w[(i, u)] * lam.sqrt();
                            }
                        }
                        b
                    })
                    .collect()),
            }
        }
        (UserPopulation::Correlated(groups), Mode::Full) => {
            let g = groups.len();
            let factors: Vec<CMatrix> = groups.iter().map(|x| x.factor()).collect();
            let mut h = CMatrix::zeros(m, k);
            for u in 0..k {
                let f = &factors[u % g];
                let w = linalg::complex_gaussian(rng, f.ncols(), 1);
                h.set_column(u, &(f * w).column(0));
            }
            Ok(vec![h])
        }
        (
            UserPopulation::OneRingRandom {
                theta_range,
                delta_range,
                spacing,
            },
            Mode::Full,
        ) => {
            let mut h = CMatrix::zeros(m, k);
            for u in 0..k {
                let theta = uniform(rng, *theta_range);
                let delta = uniform(rng, *delta_range);
                let cov = one_ring_covariance(&OneRingParams::new(theta, delta, *spacing, m)?)?;
                let (vals, vecs) = linalg::hermitian_eigen(cov.entries());
                let w = linalg::complex_gaussian(rng, m, 1);
                let mut col = CMatrix::zeros(m, 1);
                for (i, l) in vals.iter().enumerate() {
                    if *l > 0.0 {
                        col += vecs.column(i) * (w[(i, 0)] * l.sqrt());
                    }
                }
                h.set_column(u, &col.column(0));
            }
            Ok(vec![h])
        }
        (_, Mode::PerGroup) => Err(Error::InvalidInput(
            "per-group mode needs a unitary-structure population".into(),
        )),
    }
}

fn uniform(rng: &mut StreamRng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Monte Carlo ergodic sum rate for `k` users on `m` antennas. Trial `t`
/// draws from stream `t` of `seed`, so the estimate is independent of the
/// thread count and user `u` sees the same channel for every `k > u`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_sum_capacity(
    m: usize,
    k: usize,
    population: &UserPopulation,
    snr_db: f64,
    trials: usize,
    seed: u64,
    mode: Mode,
    opts: WaterfillOptions,
) -> Result<CapacityEstimate> {
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    if m == 0 || k == 0 {
        return Err(Error::InvalidInput("need at least one antenna and one user".into()));
    }
    population.check_dim(m)?;
    let budget = db_to_linear(snr_db);
    let outcomes: Vec<Result<(f64, bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let blocks = draw_trial(population, m, k, mode, &mut rng)?;
            match waterfill_blocks(&blocks, budget, opts.tol_bits, opts.max_iter) {
                Ok(sol) => Ok((sol.rate_bits, false)),
                Err(Error::Convergence { best, .. }) => {
                    let nats = super::rate::ln_det_rate_blocks(&blocks, &best.powers)
                        .ok_or_else(|| Error::InvalidInput("non-finite channel".into()))?;
                    Ok((nats / LN_2, true))
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut rates = Vec::with_capacity(trials);
    let mut failed = 0;
    for o in outcomes {
        let (r, f) = o?;
        rates.push(r);
        failed += f as usize;
    }
    if failed as f64 > MAX_FAILURE_RATE * trials as f64 {
        return Err(Error::TrialFailures { failed, trials });
    }
    let (mean, se) = mean_and_std_error(&rates);
    Ok(CapacityEstimate {
        mean_bps_hz: mean,
        std_error: se,
        trials,
        snr_db,
        failed_trials: failed,
    })
}

/// Ergodic DPC sum capacity of the system described by `geometry`.
pub fn ergodic_sum_capacity(
    geometry: &SystemGeometry,
    population: &UserPopulation,
    snr_db: f64,
    trials: usize,
    seed: u64,
    mode: Mode,
) -> Result<CapacityEstimate> {
    ergodic_sum_capacity_with(geometry, population, snr_db, trials, seed, mode, WaterfillOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn ergodic_sum_capacity_with(
    geometry: &SystemGeometry,
    population: &UserPopulation,
    snr_db: f64,
    trials: usize,
    seed: u64,
    mode: Mode,
    opts: WaterfillOptions,
) -> Result<CapacityEstimate> {
    let groups = population.num_groups();
    if groups != geometry.g && !matches!(population, UserPopulation::Iid | UserPopulation::OneRingRandom { .. }) {
        return Err(Error::Geometry(format!(
            "population has {groups} groups, geometry expects {}",
            geometry.g
        )));
    }
    if let UserPopulation::Unitary(e) = population {
        if e.rank() != geometry.r {
            return Err(Error::Geometry(format!(
                "ensemble rank {} differs from r = {}",
                e.rank(),
                geometry.r
            )));
        }
    }
    simulate_sum_capacity(geometry.m, geometry.k, population, snr_db, trials, seed, mode, opts)
}

/// Sum capacity for each user count in `k_grid` (ascending). The same seed
/// is used at every point, so user `u` keeps its channel as `K` grows.
pub fn capacity_vs_users_curve(
    m: usize,
    population: &UserPopulation,
    k_grid: &[usize],
    snr_db: f64,
    trials: usize,
    seed: u64,
    mode: Mode,
) -> Result<Vec<CapacityEstimate>> {
    if k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("user grid must be strictly ascending".into()));
    }
    k_grid
        .iter()
        .map(|&k| simulate_sum_capacity(m, k, population, snr_db, trials, seed, mode, WaterfillOptions::default()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::synthesize_unitary_ensemble;

    #[test]
    fn reproducible() {
        let a = simulate_sum_capacity(2, 3, &UserPopulation::Iid, 10.0, 20, 7, Mode::Full, Default::default()).unwrap();
        let b = simulate_sum_capacity(2, 3, &UserPopulation::Iid, 10.0, 20, 7, Mode::Full, Default::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn modes_agree_per_realisation() {
        let ens = synthesize_unitary_ensemble(8, 4, 2, &[vec![7.0, 1.0]], 2).unwrap();
        let pop = UserPopulation::Unitary(ens);
        let a = simulate_sum_capacity(8, 8, &pop, 10.0, 10, 3, Mode::Full, Default::default()).unwrap();
        let b = simulate_sum_capacity(8, 8, &pop, 10.0, 10, 3, Mode::PerGroup, Default::default()).unwrap();
        assert!((a.mean_bps_hz - b.mean_bps_hz).abs() < 1e-5);
    }

    #[test]
    fn one_user_per_group_is_parallel_channels() {
        // K = G: each group is a single user on r dimensions
        let ens = synthesize_unitary_ensemble(4, 2, 2, &[vec![3.0, 1.0]], 1).unwrap();
        let pop = UserPopulation::Unitary(ens);
        let est = simulate_sum_capacity(4, 2, &pop, 0.0, 5, 1, Mode::PerGroup, Default::default()).unwrap();
        assert!(est.mean_bps_hz > 0.0);
    }

    #[test]
    fn per_group_rejects_iid_like_populations() {
        let pop = UserPopulation::OneRingRandom {
            theta_range: (0.0, 0.1),
            delta_range: (0.1, 0.2),
            spacing: 0.5,
        };
        assert!(simulate_sum_capacity(4, 2, &pop, 0.0, 2, 1, Mode::PerGroup, Default::default()).is_err());
        assert!(simulate_sum_capacity(4, 2, &pop, 0.0, 2, 1, Mode::Full, Default::default()).is_ok());
    }

    #[test]
    fn geometry_mismatch() {
        let ens = synthesize_unitary_ensemble(8, 4, 2, &[vec![4.0, 4.0]], 2).unwrap();
        let geo = SystemGeometry::new(8, 8, 2, 2, 10).unwrap();
        let r = ergodic_sum_capacity(&geo, &UserPopulation::Unitary(ens), 0.0, 2, 0, Mode::Full);
        assert!(matches!(r, Err(Error::Geometry(_))));
    }
}
