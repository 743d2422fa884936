use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric multi-group system: `M` antennas, `K = G·K'` users in `G`
/// groups of per-group rank `r`, `T` pilot classes and coherence
/// interval `Tc` symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemGeometry {
    pub m: usize,
    pub k: usize,
    pub g: usize,
    pub r: usize,
    pub k_prime: usize,
    pub t: usize,
    pub tc: usize,
}

impl SystemGeometry {
    /// Checks `K = G·K'`, `rG ≤ M` and that every field is positive.
    pub fn new(m: usize, k: usize, g: usize, r: usize, tc: usize) -> Result<Self> {
        if m == 0 || k == 0 || g == 0 || r == 0 || tc == 0 {
            return Err(Error::Geometry(format!(
                "all dimensions must be positive (M={m}, K={k}, G={g}, r={r}, Tc={tc})"
            )));
        }
        if !k.is_multiple_of(g) {
            return Err(Error::Geometry(format!("K = {k} is not a multiple of G = {g}")));
        }
        if r * g > m {
            return Err(Error::Geometry(format!("r*G = {} exceeds M = {m}", r * g)));
        }
        Ok(Self {
            m,
            k,
            g,
            r,
            k_prime: k / g,
            t: 1,
            tc,
        })
    }

    /// Strict unitary structure, `r = M / G`.
    pub fn symmetric(m: usize, k: usize, g: usize, tc: usize) -> Result<Self> {
        if g == 0 || !m.is_multiple_of(g) {
            return Err(Error::Geometry(format!("M = {m} is not a multiple of G = {g}")));
        }
        Self::new(m, k, g, m / g, tc)
    }

    /// i.i.d. fading, one group spanning the whole array.
    pub fn iid(m: usize, k: usize, tc: usize) -> Result<Self> {
        Self::new(m, k, 1, m, tc)
    }

    pub fn with_classes(mut self, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::Geometry("number of pilot classes must be positive".into()));
        }
        self.t = t;
        Ok(self)
    }

    /// `μ = M / K`.
    pub fn mu(&self) -> f64 {
        self.m as f64 / self.k as f64
    }

    pub fn is_strict_unitary(&self) -> bool {
        self.r * self.g == self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_fields() {
        let s = SystemGeometry::symmetric(8, 16, 4, 32).unwrap();
        assert_eq!((s.r, s.k_prime, s.t), (2, 4, 1));
        assert_eq!(s.mu(), 0.5);
        assert!(s.is_strict_unitary());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SystemGeometry::new(8, 10, 4, 2, 32).is_err());
        assert!(SystemGeometry::new(8, 8, 4, 3, 32).is_err());
        assert!(SystemGeometry::symmetric(10, 8, 4, 32).is_err());
        assert!(SystemGeometry::new(8, 8, 4, 2, 0).is_err());
    }
}
