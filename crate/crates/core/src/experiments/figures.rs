use super::config::{EnsembleSpec, ExperimentConfig, ExperimentId, GeometrySpec, DESK_SCALE_MAX_K};
use super::table::ResultTable;
use crate::asymptotics::{highsnr_bounds, iid_highsnr, large_k_capacity, EigenvalueProfile};
use crate::capacity::{
    capacity_vs_users_curve, ergodic_sum_capacity, simulate_sum_capacity, Mode, SystemGeometry, UserPopulation,
    WaterfillOptions,
};
use crate::channel_models::{synthesize_unitary_ensemble, UnitaryEnsemble};
use crate::db_to_linear;
use crate::error::{Error, Result};
use crate::pilot::{pilot_bound_large_r, pilot_bound_system2, prelog_tcd, q_star, system2_optimize};

const DEFAULT_TC: usize = 100;
const SNR_SWEEP: [f64; 7] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];

/// Ensembles are drawn from their own seed so the basis never shares a
/// stream with the trial draws.
pub(crate) fn ensemble_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xB5)
}

fn profile_str(p: &[f64]) -> String {
    p.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

fn one_ring(theta_deg: (f64, f64), delta_deg: (f64, f64), spacing: f64) -> UserPopulation {
    UserPopulation::OneRingRandom {
        theta_range: (theta_deg.0.to_radians(), theta_deg.1.to_radians()),
        delta_range: (delta_deg.0.to_radians(), delta_deg.1.to_radians()),
        spacing,
    }
}

fn unitary(m: usize, g: usize, r: usize, profile: &[f64], seed: u64) -> Result<(UnitaryEnsemble, UserPopulation)> {
    let ens = synthesize_unitary_ensemble(m, g, r, &[profile.to_vec()], ensemble_seed(seed))?;
    Ok((ens.clone(), UserPopulation::Unitary(ens)))
}

/// Monte Carlo curve over the SNR grid.
#[allow(clippy::too_many_arguments)]
fn snr_curve(
    table: &mut ResultTable,
    series: &str,
    params: &str,
    m: usize,
    k: usize,
    pop: &UserPopulation,
    snr: &[f64],
    cfg: &ExperimentConfig,
    mode: Mode,
) -> Result<()> {
    if cfg.trials == 0 {
        return Ok(());
    }
    for &s in snr {
        let e = simulate_sum_capacity(m, k, pop, s, cfg.trials, cfg.seed, mode, WaterfillOptions::default())?;
        table.push_estimate(series, params, s, e.mean_bps_hz, e.std_error, e.trials);
    }
    Ok(())
}

fn dry_run_note(table: &mut ResultTable, cfg: &ExperimentConfig) {
    if cfg.trials == 0 {
        table.note("dry run: zero trials, closed-form rows only");
    }
}

struct Fig2Preset {
    m: usize,
    k: usize,
    r: usize,
    profiles: [&'static [f64]; 2],
}

const FIG2_G: usize = 4;
const FIG2_PRESETS: [Fig2Preset; 3] = [
    Fig2Preset { m: 8, k: 8, r: 2, profiles: [&[4.0, 4.0], &[7.0, 1.0]] },
    Fig2Preset { m: 16, k: 8, r: 2, profiles: [&[8.0, 8.0], &[12.0, 4.0]] },
    Fig2Preset { m: 16, k: 16, r: 4, profiles: [&[4.0, 4.0, 4.0, 4.0], &[7.0, 5.0, 3.0, 1.0]] },
];

/// Sum capacity against SNR for the three unitary presets, simulated
/// ("simul") and high-SNR closed form ("analy", with its lower end in
/// "analy_lower"), plus the i.i.d. references.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(ExperimentId::Fig2, cfg.seed, cfg.trials);
    dry_run_note(&mut table, cfg);
    let snr = cfg.snr_grid_or(&SNR_SWEEP);
    let mode = cfg.mode.unwrap_or(Mode::Full);
    let presets: Vec<&Fig2Preset> = match &cfg.geometry {
        None => FIG2_PRESETS.iter().collect(),
        Some(g) => {
            let p = FIG2_PRESETS
                .iter()
                .find(|p| p.m == g.m && p.k == g.k && p.r == g.r && g.g == FIG2_G)
                .ok_or_else(|| Error::Config(format!("no fig2 preset with M={} K={} G={} r={}", g.m, g.k, g.g, g.r)))?;
            vec![p]
        }
    };
    for p in presets {
        let geo = SystemGeometry::new(p.m, p.k, FIG2_G, p.r, DEFAULT_TC)?;
        for lam in p.profiles {
            let params = format!("M={};K={};G={FIG2_G};r={};lambda={}", p.m, p.k, p.r, profile_str(lam));
            let (ens, pop) = unitary(p.m, FIG2_G, p.r, lam, cfg.seed)?;
            let profile = EigenvalueProfile::from_ensemble(&ens);
            for &s in &snr {
                let b = highsnr_bounds(&geo, &profile, db_to_linear(s))?;
                table.push_exact("analy", &params, s, b.upper);
                table.push_exact("analy_lower", &params, s, b.lower);
            }
            if cfg.trials > 0 {
                for &s in &snr {
                    let e = ergodic_sum_capacity(&geo, &pop, s, cfg.trials, cfg.seed, mode)?;
                    table.push_estimate("simul", &params, s, e.mean_bps_hz, e.std_error, e.trials);
                }
            }
        }
        let params = format!("M={};K={}", p.m, p.k);
        for &s in &snr {
            table.push_exact("analy_iid", &params, s, iid_highsnr(p.m, p.k, db_to_linear(s))?);
        }
        snr_curve(&mut table, "simul_iid", &params, p.m, p.k, &UserPopulation::Iid, &snr, cfg, Mode::Full)?;
    }
    Ok(table)
}

/// Sum capacity against SNR at `M = 8` for few and many users: i.i.d.,
/// unitary (`G = 4`, λ = (4,4)) and one-ring users with random angles.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(ExperimentId::Fig3, cfg.seed, cfg.trials);
    dry_run_note(&mut table, cfg);
    let (m, g, r) = (8, 4, 2);
    let lam = [4.0, 4.0];
    let snr = cfg.snr_grid_or(&SNR_SWEEP);
    let mode = cfg.mode.unwrap_or(Mode::Full);
    let (ens, upop) = unitary(m, g, r, &lam, cfg.seed)?;
    let uprof = EigenvalueProfile::from_ensemble(&ens);
    let ring = one_ring((-60.0, 60.0), (5.0, 10.0), 0.5);
    for k in cfg.k_grid_or(&[4, 32]) {
        let params = format!("M={m};K={k};G={g};r={r}");
        let ugeo = SystemGeometry::new(m, k, g, r, DEFAULT_TC)?;
        let igeo = SystemGeometry::iid(m, k, DEFAULT_TC)?;
        let iprof = EigenvalueProfile::flat(1, m, 1.0)?;
        for &s in &snr {
            let p = db_to_linear(s);
            table.push_exact("analy_iid", &params, s, highsnr_bounds(&igeo, &iprof, p)?.upper);
            table.push_exact("analy_unitary", &params, s, highsnr_bounds(&ugeo, &uprof, p)?.upper);
        }
        snr_curve(&mut table, "iid", &params, m, k, &UserPopulation::Iid, &snr, cfg, Mode::Full)?;
        snr_curve(&mut table, "unitary", &params, m, k, &upop, &snr, cfg, mode)?;
        snr_curve(&mut table, "one_ring", &params, m, k, &ring, &snr, cfg, Mode::Full)?;
    }
    table.note("one-ring users: theta uniform on [-60, 60] deg, spread uniform on [5, 10] deg, D = 1/2");
    Ok(table)
}

/// Default user grid of the user sweep: powers of two from 4 to 2048.
pub fn fig4_default_k_grid() -> Vec<usize> {
    (2..=11).map(|e| 1usize << e).collect()
}

/// Sum capacity against the number of users at 10 dB for `M = 4`
/// (`G = 2`) and `M = 8` (`G = 4`), with the large-K closed form for `M = 4`.
pub fn run_fig4(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(ExperimentId::Fig4, cfg.seed, cfg.trials);
    dry_run_note(&mut table, cfg);
    let k_grid = cfg.k_grid_or(&fig4_default_k_grid());
    if k_grid.last().copied().unwrap_or(0) > DESK_SCALE_MAX_K {
        return Err(Error::Config(format!("user grid is capped at K = {DESK_SCALE_MAX_K}")));
    }
    table.note(format!("desk scale: K <= {DESK_SCALE_MAX_K}"));
    let snr_db = cfg.snr_db.as_ref().map(|s| s[0]).unwrap_or(10.0);
    let mode = cfg.mode.unwrap_or(Mode::Full);
    let ring = one_ring((-60.0, 60.0), (5.0, 20.0), 0.5);
    for (m, g, lam) in [(4usize, 2usize, [2.0, 2.0]), (8, 4, [4.0, 4.0])] {
        let r = 2;
        let params = format!("M={m};G={g};r={r};snr_db={snr_db}");
        let (ens, upop) = unitary(m, g, r, &lam, cfg.seed)?;
        if m == 4 {
            let prof = EigenvalueProfile::from_ensemble(&ens);
            for &k in &k_grid {
                if k % g != 0 || k / g <= r {
                    continue;
                }
                let geo = SystemGeometry::new(m, k, g, r, DEFAULT_TC)?;
                let v = large_k_capacity(&geo, &prof, db_to_linear(snr_db), k)?;
                table.push_exact("analy_large_k", &params, k as f64, v);
            }
        }
        if cfg.trials == 0 {
            continue;
        }
        for (series, pop, md) in [("iid", &UserPopulation::Iid, Mode::Full), ("unitary", &upop, mode), ("one_ring", &ring, Mode::Full)] {
            let curve = capacity_vs_users_curve(m, pop, &k_grid, snr_db, cfg.trials, cfg.seed, md)?;
            for (k, e) in k_grid.iter().zip(curve) {
                table.push_estimate(series, &params, *k as f64, e.mean_bps_hz, e.std_error, e.trials);
            }
        }
    }
    table.note("one-ring users: theta uniform on [-60, 60] deg, spread uniform on [5, 20] deg, D = 1/2");
    Ok(table)
}

/// Pre-log factor against `min(M, K)` for several correlation-diversity
/// degrees and coherence lengths. The exact fraction is kept in `params`.
pub fn run_fig_mux(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(ExperimentId::FigMux, cfg.seed, cfg.trials);
    let xs = cfg.k_grid_or(&(1..=512).collect::<Vec<_>>());
    let tcs = cfg.tc_grid.clone().unwrap_or_else(|| vec![32, 100]);
    let gs = match &cfg.geometry {
        Some(g) => vec![g.g],
        None => vec![1, 4, 8],
    };
    for &tc in &tcs {
        for &g in &gs {
            for &x in &xs {
                let res = prelog_tcd(x, x, g, tc)?;
                let params = format!("G={g};Tc={tc};M*={};exact={}/{}", res.m_star, res.numerator, res.denominator);
                table.push_exact("prelog", params, x as f64, res.prelog);
            }
        }
    }
    Ok(table)
}

/// `f(q)` profiles of the eigenmode search at `M = 200`, `G = 10`, with the
/// optimum (`m_p2_star`) and the system-I stream count (`m_star`) marked.
/// Abscissa is the number of eigenmodes `qG`.
pub fn run_fig_fq(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(ExperimentId::FigFq, cfg.seed, cfg.trials);
    let (m, g) = (200usize, 10usize);
    let tc = cfg.tc_grid.as_ref().map(|t| t[0]).unwrap_or(64);
    for mu in [2usize, 5] {
        let k = m / mu;
        let geo = SystemGeometry::symmetric(m, k, g, tc)?;
        for p_db in cfg.snr_grid_or(&[10.0, 20.0, 30.0]) {
            let opt = system2_optimize(&geo, db_to_linear(p_db))?;
            let params = format!("mu={mu};M={m};K={k};G={g};Tc={tc};P_db={p_db}");
            for (q, f) in &opt.profile {
                table.push_exact("f_q", &params, (q * g) as f64, *f);
            }
            table.push_exact("m_p2_star", &params, opt.m_p2_star as f64, opt.profile[&opt.q_opt]);
            if let Some(f) = opt.profile.get(&opt.q_star) {
                table.push_exact("m_star", &params, opt.m_star as f64, *f);
            }
        }
    }
    Ok(table)
}

/// Sum-rate bounds of pilot-aided systems I and II against `K = min(M, K)`
/// with `M = 2K`, flat eigenvalues, and the i.i.d. (single group) curve.
pub fn run_fig_pilot(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(ExperimentId::FigPilot, cfg.seed, cfg.trials);
    let g = cfg.geometry.map(|x| x.g).unwrap_or(10);
    let mu = 2;
    let tcs = cfg.tc_grid.clone().unwrap_or_else(|| vec![32, 128]);
    let ks = cfg.k_grid_or(&(1..=30).map(|i| 10 * i).collect::<Vec<_>>());
    table.note("system II additive constant taken as 0");
    for p_db in cfg.snr_grid_or(&[30.0]) {
        let p = db_to_linear(p_db);
        for &tc in &tcs {
            for &k in &ks {
                if k % g != 0 {
                    return Err(Error::Config(format!("K = {k} is not a multiple of G = {g}")));
                }
                let m = mu * k;
                let params = format!("mu={mu};G={g};Tc={tc};P_db={p_db};M={m}");
                let geo = SystemGeometry::symmetric(m, k, g, tc)?;
                let prof = EigenvalueProfile::flat(g, geo.r, g as f64)?;
                let s1 = system1(&geo, &prof, p)?;
                table.push_exact("system1", &params, k as f64, s1);
                let qs = q_star(geo.r, geo.k_prime, tc);
                let s2 = if qs < geo.k_prime {
                    None
                } else {
                    let opt = system2_optimize(&geo, p)?;
                    if opt.q_opt == geo.k_prime {
                        None
                    } else {
                        let b = pilot_bound_system2(&geo, &prof, p, opt.m_p2_star, None)?;
                        Some(k as f64 * b.upper)
                    }
                };
                match s2 {
                    Some(v) => table.push_exact("system2", &params, k as f64, v),
                    None => table.push_exact("system2", format!("{params};same_as=system1"), k as f64, s1),
                }
                let igeo = SystemGeometry::symmetric(m, k, 1, tc)?;
                let iprof = EigenvalueProfile::flat(1, m, 1.0)?;
                table.push_exact("iid", &params, k as f64, system1(&igeo, &iprof, p)?);
            }
        }
    }
    Ok(table)
}

/// System-I sum-rate bound: `M*` streams times the per-stream bound.
fn system1(geo: &SystemGeometry, prof: &EigenvalueProfile, p: f64) -> Result<f64> {
    let m_star = q_star(geo.r, geo.k_prime, geo.tc) * geo.g;
    Ok(m_star as f64 * pilot_bound_large_r(geo, prof, p)?.upper)
}

/// User-specified geometry and ensemble over an SNR grid.
pub fn run_custom(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(ExperimentId::Custom, cfg.seed, cfg.trials);
    dry_run_note(&mut table, cfg);
    let (Some(gs), Some(ens)) = (cfg.geometry, cfg.ensemble.as_ref()) else {
        return Err(Error::Config("custom experiments need a geometry and an ensemble".into()));
    };
    let GeometrySpec { m, k, g, r, tc } = gs;
    let snr = cfg.snr_grid_or(&[0.0, 10.0, 20.0, 30.0]);
    let params = format!("M={m};K={k};G={g};r={r}");
    let mut mode = cfg.mode.unwrap_or(Mode::Full);
    let pop = match ens {
        EnsembleSpec::Iid => {
            if m >= k {
                for &s in &snr {
                    table.push_exact("analy", &params, s, iid_highsnr(m, k, db_to_linear(s))?);
                }
            }
            UserPopulation::Iid
        }
        EnsembleSpec::Unitary { profiles } => {
            let geo = SystemGeometry::new(m, k, g, r, tc)?;
            let e = synthesize_unitary_ensemble(m, g, r, profiles, ensemble_seed(cfg.seed))?;
            let prof = EigenvalueProfile::from_ensemble(&e);
            for &s in &snr {
                let b = highsnr_bounds(&geo, &prof, db_to_linear(s))?;
                table.push_exact("analy", &params, s, b.upper);
                table.push_exact("analy_lower", &params, s, b.lower);
            }
            UserPopulation::Unitary(e)
        }
        EnsembleSpec::OneRing { theta_deg, delta_deg, spacing } => {
            mode = Mode::Full;
            one_ring(*theta_deg, *delta_deg, *spacing)
        }
    };
    snr_curve(&mut table, "simul", &params, m, k, &pop, &snr, cfg, mode)?;
    Ok(table)
}
