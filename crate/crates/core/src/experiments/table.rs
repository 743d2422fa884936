use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentId};
use crate::error::Result;
use crate::output::{csv_string, write_atomic, write_json};
use crate::VERSION;

pub const TABLE_SCHEMA: &str = "tcd-results/1";

/// One emitted value. `params` is a `key=value;...` string so that each row
/// can be read on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub series: String,
    pub params: String,
    pub x: f64,
    pub value: f64,
    pub std_error: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub schema_version: String,
    pub experiment: ExperimentId,
    pub seed: u64,
    pub trials: usize,
    pub version: String,
    /// Desk-scale substitutions and other remarks about the run.
    pub notes: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new(experiment: ExperimentId, seed: u64, trials: usize) -> Self {
        Self {
            schema_version: TABLE_SCHEMA.into(),
            experiment,
            seed,
            trials,
            version: VERSION.into(),
            notes: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Closed-form row (no standard error, zero trials).
    pub fn push_exact(&mut self, series: impl Into<String>, params: impl Into<String>, x: f64, value: f64) {
        self.push(series.into(), params.into(), x, value, None, 0);
    }

    pub fn push_estimate(
        &mut self,
        series: impl Into<String>,
        params: impl Into<String>,
        x: f64,
        value: f64,
        std_error: f64,
        trials: usize,
    ) {
        self.push(series.into(), params.into(), x, value, Some(std_error), trials);
    }

    fn push(&mut self, series: String, params: String, x: f64, value: f64, std_error: Option<f64>, trials: usize) {
        self.rows.push(ResultRow {
            experiment: self.experiment.as_str().into(),
            series,
            params,
            x,
            value,
            std_error,
            trials,
            seed: self.seed,
            version: self.version.clone(),
        });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Rows of one series, in emission order.
    pub fn series<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.series == name)
    }

    /// Rows of a series whose parameter string contains `params`.
    pub fn select<'a>(&'a self, series: &'a str, params: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.series(series).filter(move |r| r.params.contains(params))
    }

    pub fn series_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.series) {
                out.push(r.series.clone());
            }
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        csv_string(&self.rows)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: String,
    pub experiment: ExperimentId,
    pub seed: u64,
    pub trials: usize,
    pub version: String,
    pub rows: usize,
    pub series: Vec<String>,
    pub csv: PathBuf,
    pub notes: Vec<String>,
    pub config: ExperimentConfig,
}

/// Writes the CSV to `path` and, when the config asks for it, a manifest
/// at `path` with extension `.json`. Returns the paths written.
pub fn write_table(table: &ResultTable, config: &ExperimentConfig, path: &Path) -> Result<Vec<PathBuf>> {
    write_atomic(path, table.to_csv()?.as_bytes())?;
    let mut written = vec![path.to_path_buf()];
    if config.manifest {
        let mpath = path.with_extension("json");
        let manifest = Manifest {
            schema_version: table.schema_version.clone(),
            experiment: table.experiment,
            seed: table.seed,
            trials: table.trials,
            version: table.version.clone(),
            rows: table.rows.len(),
            series: table.series_names(),
            csv: PathBuf::from(path.file_name().unwrap_or_default()),
            notes: table.notes.clone(),
            config: config.clone(),
        };
        write_json(&mpath, &manifest)?;
        written.push(mpath);
    }
    Ok(written)
}
