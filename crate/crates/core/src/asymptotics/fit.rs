use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// High-SNR affine approximation `C ≈ S∞ (log2 P - L∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineApprox {
    /// Multiplexing gain `S∞`.
    pub slope: f64,
    /// Power offset `L∞` in units of `log2 P` (3 dB).
    pub offset: f64,
    pub intercept: f64,
    pub points_used: usize,
}

impl AffineApprox {
    pub fn eval(&self, snr_db: f64) -> f64 {
        self.slope * (db_to_log2(snr_db) - self.offset)
    }
}

fn db_to_log2(db: f64) -> f64 {
    db / 10.0 * std::f64::consts::LOG2_10
}

/// Least-squares line through the top third of `curve` (at least three
/// points), with `curve` given as `(snr_db, bits)` pairs sorted by SNR.
pub fn affine_fit(curve: &[(f64, f64)]) -> Result<AffineApprox> {
    if curve.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", curve.len())));
    }
    if curve.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Fit("SNR grid must be strictly ascending".into()));
    }
    let n = curve.len().div_ceil(3).max(3);
    let tail = &curve[curve.len() - n..];
    let xs: Vec<f64> = tail.iter().map(|(db, _)| db_to_log2(*db)).collect();
    let ys: Vec<f64> = tail.iter().map(|(_, c)| *c).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(Error::Fit(format!("non-positive slope {slope} in the high-SNR tail")));
    }
    let intercept = my - slope * mx;
    Ok(AffineApprox {
        slope,
        offset: -intercept / slope,
        intercept,
        points_used: n,
    })
}
