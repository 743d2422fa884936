use serde::{Deserialize, Serialize};

use crate::capacity::SystemGeometry;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrelogRegime {
    Iid,
    Tcd,
    Multiclass,
    System2,
}

impl PrelogRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            PrelogRegime::Iid => "iid",
            PrelogRegime::Tcd => "tcd",
            PrelogRegime::Multiclass => "multiclass",
            PrelogRegime::System2 => "system2",
        }
    }
}

/// Pre-log factor `numerator / denominator` with the stream count that
/// attains it. The fraction is kept exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrelogResult {
    pub m_star: u64,
    pub numerator: u64,
    pub denominator: u64,
    pub prelog: f64,
    pub regime: PrelogRegime,
    pub flags: Vec<String>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PrelogResult {
    fn new(m_star: u64, numerator: u64, denominator: u64, regime: PrelogRegime) -> Self {
        let g = gcd(numerator, denominator).max(1);
        let (numerator, denominator) = (numerator / g, denominator / g);
        Self {
            m_star,
            numerator,
            denominator,
            prelog: numerator as f64 / denominator as f64,
            regime,
            flags: Vec::new(),
        }
    }

    /// Exact comparison with the fraction `a / b`.
    pub fn equals_fraction(&self, a: u64, b: u64) -> bool {
        self.numerator as u128 * b as u128 == a as u128 * self.denominator as u128
    }
}

fn positive(vals: &[(usize, &str)]) -> Result<()> {
    for (v, name) in vals {
        if *v == 0 {
            return Err(Error::InvalidInput(format!("{name} must be positive")));
        }
    }
    Ok(())
}

/// Eigenmodes per group that maximise `min{q, K'}(Tc - q)`:
/// `min{r, K', ⌊Tc/2⌋}`.
pub fn q_star(r: usize, k_prime: usize, tc: usize) -> usize {
    r.min(k_prime).min(tc / 2)
}

/// Pre-log with i.i.d. fading: `M*(1 - M*/Tc)`, `M* = min{M, K, ⌊Tc/2⌋}`.
pub fn prelog_iid(m: usize, k: usize, tc: usize) -> Result<PrelogResult> {
    positive(&[(m, "M"), (k, "K"), (tc, "Tc")])?;
    let s = m.min(k).min(tc / 2) as u64;
    Ok(PrelogResult::new(s, s * (tc as u64 - s), tc as u64, PrelogRegime::Iid))
}

/// Pre-log with `G` orthogonal groups: `M*(1 - M*/(Tc G))`,
/// `M* = min{M, K, ⌊Tc G/2⌋}`.
pub fn prelog_tcd(m: usize, k: usize, g: usize, tc: usize) -> Result<PrelogResult> {
    let mut out = prelog_multiclass(m, k, g, 1, tc)?;
    out.regime = PrelogRegime::Tcd;
    Ok(out)
}

/// Pre-log with `T` pilot classes sharing the block:
/// `M*(1 - M* T/(Tc G))`, `M* = min{M, K, ⌊Tc G/(2T)⌋}`. Flags `T ≥ G`,
/// where the pre-beamformed pilot gives no saving.
pub fn prelog_multiclass(m: usize, k: usize, g: usize, t: usize, tc: usize) -> Result<PrelogResult> {
    positive(&[(m, "M"), (k, "K"), (g, "G"), (t, "T"), (tc, "Tc")])?;
    let d = (tc * g) as u64;
    let t64 = t as u64;
    let s = (m.min(k) as u64).min(d / (2 * t64));
    let mut out = PrelogResult::new(s, s * (d - s * t64), d, PrelogRegime::Multiclass);
    if t > 1 && t >= g {
        out.flags.push(format!("T = {t} >= G = {g}: pre-beamformed pilots give no saving"));
    }
    Ok(out)
}

/// Training symbols per coherence block and the conventional baseline.
pub fn pilot_symbols(geo: &SystemGeometry, scheme: super::Scheme) -> (usize, usize) {
    match scheme {
        super::Scheme::FddPrebeamformed => (geo.r, geo.m),
        super::Scheme::TddReciprocal => (geo.k_prime, geo.k),
    }
}

/// One CSV row of a dimensioning table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotRow {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "G")]
    pub g: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "Tc")]
    pub tc: usize,
    pub q_star: usize,
    pub m_star: u64,
    pub prelog: f64,
    pub regime: String,
}

impl PilotRow {
    pub fn new(geo: &SystemGeometry, result: &PrelogResult) -> Self {
        Self {
            m: geo.m,
            k: geo.k,
            g: geo.g,
            t: geo.t,
            tc: geo.tc,
            q_star: q_star(geo.r, geo.k_prime, geo.tc),
            m_star: result.m_star,
            prelog: result.prelog,
            regime: result.regime.as_str().into(),
        }
    }
}
