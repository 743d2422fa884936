//! JSON interchange for covariances and ensembles.
//!
//! ```json
//! { "version": "tcd-cov/1", "kind": "covariance", "rows": 2, "cols": 2,
//!   "trace_normalized": true, "entries": [[1,0],[0.5,0.1],[0.5,-0.1],[1,0]] }
//! ```
//!
//! Complex entries are `[re, im]` pairs in row-major order. An ensemble
//! document has `"kind": "unitary_ensemble"` and a `groups` array whose
//! members carry `basis` (an `M x r` matrix in the same layout) and
//! `eigenvalues`.

use serde::{Deserialize, Serialize};

use super::types::{CovarianceMatrix, GroupEigenStructure, UnitaryEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

pub const SCHEMA_VERSION: &str = "tcd-cov/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {}x{} matrix",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.entries[i * self.cols + j];
            c(re, im)
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroupDoc {
    pub basis: MatrixDoc,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Covariance {
        trace_normalized: bool,
        #[serde(flatten)]
        matrix: MatrixDoc,
    },
    UnitaryEnsemble {
        groups: Vec<GroupDoc>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Document {
    pub version: String,
    #[serde(flatten)]
    pub payload: Payload,
}

impl Document {
    pub fn from_covariance(cov: &CovarianceMatrix) -> Self {
        Self {
            version: SCHEMA_VERSION.into(),
            payload: Payload::Covariance {
                trace_normalized: cov.is_trace_normalized(),
                matrix: MatrixDoc::from_matrix(cov.entries()),
            },
        }
    }

    pub fn from_ensemble(ens: &UnitaryEnsemble) -> Self {
        Self {
            version: SCHEMA_VERSION.into(),
            payload: Payload::UnitaryEnsemble {
                groups: ens
                    .groups()
                    .iter()
                    .map(|g| GroupDoc {
                        basis: MatrixDoc::from_matrix(g.basis()),
                        eigenvalues: g.eigenvalues().to_vec(),
                    })
                    .collect(),
            },
        }
    }

    fn check_version(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported schema version {:?}, expected {SCHEMA_VERSION:?}",
                self.version
            )));
        }
        Ok(())
    }

    pub fn to_covariance(&self) -> Result<CovarianceMatrix> {
        self.check_version()?;
        match &self.payload {
            Payload::Covariance {
                trace_normalized,
                matrix,
            } => CovarianceMatrix::new(matrix.to_matrix()?, *trace_normalized),
            Payload::UnitaryEnsemble { .. } => Err(Error::InvalidInput("document holds an ensemble".into())),
        }
    }

    pub fn to_ensemble(&self) -> Result<UnitaryEnsemble> {
        self.check_version()?;
        match &self.payload {
            Payload::UnitaryEnsemble { groups } => {
                let groups = groups
                    .iter()
                    .map(|g| GroupEigenStructure::new(g.basis.to_matrix()?, g.eigenvalues.clone()))
                    .collect::<Result<Vec<_>>>()?;
                UnitaryEnsemble::new(groups)
            }
            Payload::Covariance { .. } => Err(Error::InvalidInput("document holds a covariance".into())),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::{one_ring_covariance, synthesize_unitary_ensemble, OneRingParams};

    #[test]
    fn covariance_round_trip() {
        let p = OneRingParams::from_degrees(20.0, 10.0, 0.5, 5).unwrap();
        let cov = one_ring_covariance(&p).unwrap();
        let json = Document::from_covariance(&cov).to_json().unwrap();
        assert!(json.contains("\"tcd-cov/1\""));
        assert!(json.contains("\"covariance\""));
        let back = Document::from_json(&json).unwrap().to_covariance().unwrap();
        assert_eq!(back.entries(), cov.entries());
    }

    #[test]
    fn ensemble_round_trip() {
        let ens = synthesize_unitary_ensemble(8, 4, 2, &[vec![7.0, 1.0]], 3).unwrap();
        let json = Document::from_ensemble(&ens).to_json().unwrap();
        let back = Document::from_json(&json).unwrap().to_ensemble().unwrap();
        assert_eq!(back, ens);
    }

    #[test]
    fn row_major_layout() {
        let m = CMatrix::from_fn(2, 3, |i, j| c((3 * i + j) as f64, 0.0));
        let d = MatrixDoc::from_matrix(&m);
        let re: Vec<f64> = d.entries.iter().map(|e| e[0]).collect();
        assert_eq!(re, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn wrong_version_rejected() {
        let ens = synthesize_unitary_ensemble(4, 2, 2, &[vec![2.0, 2.0]], 1).unwrap();
        let mut doc = Document::from_ensemble(&ens);
        doc.version = "tcd-cov/0".into();
        assert!(doc.to_ensemble().is_err());
        assert!(Document::from_ensemble(&ens).to_covariance().is_err());
    }
}
