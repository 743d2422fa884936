//! `tcd`: command-line front end to tcd-core.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tcd_core::asymptotics::{
    highsnr_bounds, iid_highsnr, large_system_ratio, BoundRow, EigenvalueProfile, LargeSystemPopulation,
};
use tcd_core::capacity::{ergodic_sum_capacity, CapacityRow, Mode, SystemGeometry, UserPopulation};
use tcd_core::channel_models::schema::Document;
use tcd_core::channel_models::{one_ring_covariance, synthesize_unitary_ensemble, OneRingParams};
use tcd_core::experiments::{self, ExperimentConfig, ExperimentId, DEFAULT_SEED, DEFAULT_TRIALS};
use tcd_core::output::{csv_string, write_atomic};
use tcd_core::pilot::{prelog_iid, prelog_multiclass, prelog_tcd, PilotRow};
use tcd_core::{db_to_linear, Error};

#[derive(Parser, Debug)]
#[command(name = "tcd", version, about = "Correlated MIMO broadcast capacity tools")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per point.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; stdout when omitted (figures default to `<id>.csv`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a one-ring covariance or a unitary-structure ensemble (JSON).
    Cov {
        #[command(subcommand)]
        kind: CovKind,
    },
    /// Monte Carlo ergodic sum capacity (CSV).
    Capacity(CapacityArgs),
    /// High-SNR or large-system capacity bounds (CSV).
    Bounds(BoundsArgs),
    /// Training-aware pre-log factors (CSV).
    Pilot(PilotArgs),
    /// Run a figure preset, or the experiment described by --config.
    Figure {
        /// fig2, fig3, fig4, fig_mux, fig_fq, fig_pilot or custom.
        id: Option<String>,
        /// Also write a JSON manifest next to the CSV.
        #[arg(long)]
        manifest: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CovKind {
    OneRing {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        theta_deg: f64,
        #[arg(long)]
        delta_deg: f64,
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
    },
    Ensemble {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        r: usize,
        /// Eigenvalues shared by every group, summing to M.
        #[arg(long, value_delimiter = ',')]
        profile: Vec<f64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EnsembleKind {
    Iid,
    Unitary,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    PerGroup,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => Mode::Full,
            ModeArg::PerGroup => Mode::PerGroup,
        }
    }
}

#[derive(Args, Debug)]
struct CapacityArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    g: usize,
    /// Defaults to M for i.i.d. users.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,10,20,30")]
    snr_db: Vec<f64>,
    #[arg(long, value_enum, default_value_t = EnsembleKind::Iid)]
    ensemble: EnsembleKind,
    #[arg(long, value_delimiter = ',')]
    profile: Vec<f64>,
    /// Unitary ensemble document written by `tcd cov ensemble`.
    #[arg(long)]
    cov: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    #[arg(long, default_value_t = 100)]
    tc: usize,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    g: usize,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    profile: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "30")]
    snr_db: Vec<f64>,
    /// Large-system ratio at this load `M/K` instead of the finite bounds.
    #[arg(long)]
    mu: Option<f64>,
    /// Smallest eigenvalue for the correlated large-system lower end.
    #[arg(long)]
    lambda_min: Option<f64>,
}

#[derive(Args, Debug)]
struct PilotArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    g: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long)]
    tc: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tcd: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        3
    } else if matches!(e, Error::Io(_)) {
        1
    } else {
        2
    }
}

fn emit(out: Option<&Path>, text: &str) -> tcd_core::Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> tcd_core::Result<()> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let trials = cli.trials.unwrap_or(DEFAULT_TRIALS);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Cov { kind } => {
            let doc = match kind {
                CovKind::OneRing {
                    m,
                    theta_deg,
                    delta_deg,
                    spacing,
                } => Document::from_covariance(&one_ring_covariance(&OneRingParams::from_degrees(
                    theta_deg, delta_deg, spacing, m,
                )?)?),
                CovKind::Ensemble { m, g, r, profile } => {
                    Document::from_ensemble(&synthesize_unitary_ensemble(m, g, r, &[profile], seed)?)
                }
            };
            emit(out, &(doc.to_json()? + "\n"))
        }
        Command::Capacity(a) => capacity(a, seed, trials, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Pilot(a) => {
            let geo = SystemGeometry::symmetric(a.m, a.k, a.g, a.tc)?.with_classes(a.t)?;
            let rows = vec![
                PilotRow::new(&geo, &prelog_iid(a.m, a.k, a.tc)?),
                PilotRow::new(&geo, &prelog_tcd(a.m, a.k, a.g, a.tc)?),
                PilotRow::new(&geo, &prelog_multiclass(a.m, a.k, a.g, a.t, a.tc)?),
            ];
            emit(out, &csv_string(&rows)?)
        }
        Command::Figure { id, manifest } => {
            let mut cfg = match (&cli.config, id) {
                (Some(path), id) => {
                    let cfg = ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?;
                    if let Some(id) = id {
                        if id.parse::<ExperimentId>()? != cfg.experiment {
                            return Err(Error::Config(format!(
                                "figure {id} does not match config experiment {}",
                                cfg.experiment
                            )));
                        }
                    }
                    cfg
                }
                (None, Some(id)) => ExperimentConfig::new(id.parse()?),
                (None, None) => return Err(Error::Config("figure needs an id or --config".into())),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(t) = cli.trials {
                cfg.trials = t;
            }
            if let Some(o) = &cli.out {
                cfg.output = Some(o.clone());
            }
            cfg.manifest |= manifest;
            let (table, written) = experiments::run_and_write(&cfg, Path::new("."))?;
            for p in written {
                eprintln!("wrote {} ({} rows)", p.display(), table.rows.len());
            }
            Ok(())
        }
    }
}

fn capacity(a: CapacityArgs, seed: u64, trials: usize, out: Option<&Path>) -> tcd_core::Result<()> {
    let (geo, pop) = match (a.ensemble, &a.cov) {
        (_, Some(path)) => {
            let ens = Document::from_json(&std::fs::read_to_string(path)?)?.to_ensemble()?;
            let geo = SystemGeometry::new(a.m, a.k, ens.num_groups(), ens.rank(), a.tc)?;
            (geo, UserPopulation::Unitary(ens))
        }
        (EnsembleKind::Iid, None) => (
            SystemGeometry::new(a.m, a.k, a.g, a.r.unwrap_or(a.m / a.g), a.tc)?,
            UserPopulation::Iid,
        ),
        (EnsembleKind::Unitary, None) => {
            let r = a.r.ok_or_else(|| Error::Config("unitary ensembles need --r".into()))?;
            let geo = SystemGeometry::new(a.m, a.k, a.g, r, a.tc)?;
            let ens = synthesize_unitary_ensemble(a.m, a.g, r, std::slice::from_ref(&a.profile), seed)?;
            (geo, UserPopulation::Unitary(ens))
        }
    };
    let mode = a.mode.into();
    let mut rows = Vec::with_capacity(a.snr_db.len());
    for &s in &a.snr_db {
        let est = ergodic_sum_capacity(&geo, &pop, s, trials, seed, mode)?;
        rows.push(CapacityRow::new(&geo, mode, &est, seed));
    }
    emit(out, &csv_string(&rows)?)
}

fn bounds(a: BoundsArgs, out: Option<&Path>) -> tcd_core::Result<()> {
    let mut rows = Vec::new();
    if let Some(mu) = a.mu {
        let pop = match a.lambda_min {
            Some(lambda_min) => LargeSystemPopulation::Correlated { g: a.g, lambda_min },
            None => LargeSystemPopulation::Iid,
        };
        for &s in &a.snr_db {
            let b = large_system_ratio(mu, db_to_linear(s), pop)?;
            rows.push(BoundRow::new(&b, format!("mu={mu};snr_db={s}")));
        }
        return emit(out, &csv_string(&rows)?);
    }
    let (Some(m), Some(k)) = (a.m, a.k) else {
        return Err(Error::Config("bounds need --m and --k, or --mu".into()));
    };
    let r = a.r.unwrap_or(m / a.g);
    let geo = SystemGeometry::new(m, k, a.g, r, 100)?;
    let profile = if a.profile.is_empty() {
        EigenvalueProfile::flat(a.g, r, m as f64 / r as f64)?
    } else {
        EigenvalueProfile::repeated(a.g, &a.profile)?
    };
    for &s in &a.snr_db {
        let p = db_to_linear(s);
        let b = highsnr_bounds(&geo, &profile, p)?;
        rows.push(BoundRow::new(&b, format!("M={m};K={k};G={};r={r};snr_db={s}", a.g)));
        if a.g == 1 && m >= k {
            let v = iid_highsnr(m, k, p)?;
            rows.push(BoundRow {
                regime: "iid".into(),
                parameters: format!("M={m};K={k};snr_db={s}"),
                lower: v,
                upper: v,
                center: v,
            });
        }
    }
    emit(out, &csv_string(&rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Geometry("x".into())), 2);
        assert_eq!(exit_code(&Error::TrialFailures { failed: 3, trials: 10 }), 3);
        assert_eq!(exit_code(&Error::Integration("x".into())), 3);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
