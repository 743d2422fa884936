use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::capacity::Mode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Fig2,
    Fig3,
    Fig4,
    FigMux,
    FigFq,
    FigPilot,
    Custom,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::Fig2,
        ExperimentId::Fig3,
        ExperimentId::Fig4,
        ExperimentId::FigMux,
        ExperimentId::FigFq,
        ExperimentId::FigPilot,
        ExperimentId::Custom,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::FigMux => "fig_mux",
            ExperimentId::FigFq => "fig_fq",
            ExperimentId::FigPilot => "fig_pilot",
            ExperimentId::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub m: usize,
    pub k: usize,
    pub g: usize,
    pub r: usize,
    #[serde(default = "default_tc")]
    pub tc: usize,
}

fn default_tc() -> usize {
    100
}

/// User covariance model of a custom run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleSpec {
    Iid,
    /// Random unitary ensemble with one profile per group, or one shared.
    Unitary { profiles: Vec<Vec<f64>> },
    /// Per-user one-ring draws; ranges in degrees.
    OneRing {
        theta_deg: (f64, f64),
        delta_deg: (f64, f64),
        #[serde(default = "default_spacing")]
        spacing: f64,
    },
}

fn default_spacing() -> f64 {
    0.5
}

pub const DEFAULT_TRIALS: usize = 2000;
pub const DEFAULT_SEED: u64 = 1;
/// Largest user count simulated by the user-sweep preset.
pub const DESK_SCALE_MAX_K: usize = 2048;

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Experiment description, read from JSON. Unset grids fall back to the
/// preset of the chosen experiment. `trials = 0` skips every Monte Carlo
/// series and keeps only closed-form rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub snr_db: Option<Vec<f64>>,
    #[serde(default)]
    pub k_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub tc_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Also write a JSON manifest next to the CSV.
    #[serde(default)]
    pub manifest: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            snr_db: None,
            k_grid: None,
            tc_grid: None,
            geometry: None,
            ensemble: None,
            mode: None,
            output: None,
            manifest: false,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.snr_db {
            ascending_f64(g, "snr_db")?;
        }
        if let Some(g) = &self.k_grid {
            ascending_usize(g, "k_grid")?;
            if g[0] == 0 {
                return Err(Error::Config("k_grid entries must be positive".into()));
            }
        }
        if let Some(g) = &self.tc_grid {
            ascending_usize(g, "tc_grid")?;
            if g[0] == 0 {
                return Err(Error::Config("tc_grid entries must be positive".into()));
            }
        }
        if self.experiment == ExperimentId::Custom && (self.geometry.is_none() || self.ensemble.is_none()) {
            return Err(Error::Config("custom experiments need a geometry and an ensemble".into()));
        }
        Ok(())
    }

    pub(crate) fn snr_grid_or(&self, default: &[f64]) -> Vec<f64> {
        self.snr_db.clone().unwrap_or_else(|| default.to_vec())
    }

    pub(crate) fn k_grid_or(&self, default: &[usize]) -> Vec<usize> {
        self.k_grid.clone().unwrap_or_else(|| default.to_vec())
    }
}

fn ascending_f64(g: &[f64], name: &str) -> Result<()> {
    if g.is_empty() || g.windows(2).any(|w| !(w[0] < w[1])) || g.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{name} must be a nonempty ascending grid")));
    }
    Ok(())
}

fn ascending_usize(g: &[usize], name: &str) -> Result<()> {
    if g.is_empty() || g.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("{name} must be a nonempty ascending grid")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "fig_mux"}"#).unwrap();
        assert_eq!(c.experiment, ExperimentId::FigMux);
        assert_eq!(c.trials, DEFAULT_TRIALS);
    }

    #[test]
    fn rejects_bad_grids_and_fields() {
        assert!(ExperimentConfig::from_json(r#"{"experiment": "fig2", "snr_db": [10, 0]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "fig2", "k_grid": []}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "fig9"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "fig2", "bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "custom"}"#).is_err());
    }

    #[test]
    fn custom_round_trip() {
        let json = r#"{"experiment": "custom", "geometry": {"m": 4, "k": 4, "g": 2, "r": 2},
            "ensemble": {"one_ring": {"theta_deg": [-60, 60], "delta_deg": [5, 10]}}}"#;
        let c = ExperimentConfig::from_json(json).unwrap();
        assert_eq!(c.geometry.unwrap().tc, 100);
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn id_parsing() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
    }
}
