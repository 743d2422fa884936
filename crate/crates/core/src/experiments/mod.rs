//! Figure presets and user-defined runs producing [`ResultTable`]s.

mod config;
mod figures;
mod table;

use std::path::{Path, PathBuf};

pub use config::{
    EnsembleSpec, ExperimentConfig, ExperimentId, GeometrySpec, DEFAULT_SEED, DEFAULT_TRIALS, DESK_SCALE_MAX_K,
};
pub use figures::{
    fig4_default_k_grid, run_custom, run_fig2, run_fig3, run_fig4, run_fig_fq, run_fig_mux, run_fig_pilot,
};
pub use table::{write_table, Manifest, ResultRow, ResultTable, TABLE_SCHEMA};

use crate::error::Result;

pub fn run(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    match config.experiment {
        ExperimentId::Fig2 => run_fig2(config),
        ExperimentId::Fig3 => run_fig3(config),
        ExperimentId::Fig4 => run_fig4(config),
        ExperimentId::FigMux => run_fig_mux(config),
        ExperimentId::FigFq => run_fig_fq(config),
        ExperimentId::FigPilot => run_fig_pilot(config),
        ExperimentId::Custom => run_custom(config),
    }
}

/// Runs the experiment and writes its outputs to `config.output`, or to
/// `<id>.csv` in `default_dir`.
pub fn run_and_write(config: &ExperimentConfig, default_dir: &Path) -> Result<(ResultTable, Vec<PathBuf>)> {
    let table = run(config)?;
    let path = config
        .output
        .clone()
        .unwrap_or_else(|| default_dir.join(format!("{}.csv", config.experiment)));
    let written = write_table(&table, config, &path)?;
    Ok((table, written))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(id: ExperimentId, trials: usize) -> ExperimentConfig {
        ExperimentConfig::new(id).with_trials(trials).with_seed(3)
    }

    #[test]
    fn dry_run_fig2_is_analytic_only() {
        let t = run(&cfg(ExperimentId::Fig2, 0)).unwrap();
        assert!(!t.rows.is_empty());
        assert!(t.rows.iter().all(|r| r.std_error.is_none() && r.series.starts_with("analy")));
        assert!(t.rows.iter().all(|r| r.seed == 3 && r.version == crate::VERSION));
    }

    #[test]
    fn fig2_unknown_preset() {
        let mut c = cfg(ExperimentId::Fig2, 0);
        c.geometry = Some(GeometrySpec { m: 12, k: 8, g: 4, r: 2, tc: 100 });
        assert!(matches!(run(&c), Err(crate::Error::Config(_))));
    }

    #[test]
    fn analytic_rows_ignore_trials() {
        let mut a = cfg(ExperimentId::Fig2, 0);
        a.snr_db = Some(vec![20.0]);
        a.geometry = Some(GeometrySpec { m: 8, k: 8, g: 4, r: 2, tc: 100 });
        let mut b = a.clone();
        b.trials = 4;
        let ta = run(&a).unwrap();
        let tb = run(&b).unwrap();
        let analy = |t: &ResultTable| t.series("analy").map(|r| r.value).collect::<Vec<_>>();
        assert_eq!(analy(&ta), analy(&tb));
        assert_eq!(tb.series("simul").count(), 2);
    }

    #[test]
    fn fig_mux_saturation() {
        let t = run(&cfg(ExperimentId::FigMux, 0)).unwrap();
        let last = |p: &str| t.select("prelog", p).last().unwrap().value;
        assert_eq!(last("G=1;Tc=32;"), 8.0);
        assert_eq!(last("G=4;Tc=32;"), 32.0);
    }

    #[test]
    fn fig_pilot_single_group_matches_iid() {
        let mut c = cfg(ExperimentId::FigPilot, 0);
        c.geometry = Some(GeometrySpec { m: 1, k: 1, g: 1, r: 1, tc: 100 });
        let t = run(&c).unwrap();
        let s1: Vec<f64> = t.series("system1").map(|r| r.value).collect();
        let iid: Vec<f64> = t.series("iid").map(|r| r.value).collect();
        assert_eq!(s1, iid);
    }

    #[test]
    fn writes_csv_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(ExperimentId::FigFq, 0);
        c.manifest = true;
        let (t, paths) = run_and_write(&c, dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        let csv = std::fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(csv.lines().count(), t.rows.len() + 1);
        let m: Manifest = serde_json::from_str(&std::fs::read_to_string(&paths[1]).unwrap()).unwrap();
        assert_eq!(m.rows, t.rows.len());
    }
}
