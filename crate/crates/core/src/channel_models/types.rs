use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

/// Geometry of a one-ring scattering user seen from a uniform linear
/// array: angle of departure `theta`, angular spread `delta` (both in
/// radians), element spacing in wavelengths and array size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneRingParams {
    pub theta: f64,
    pub delta: f64,
    pub spacing: f64,
    pub num_antennas: usize,
}

impl OneRingParams {
    pub fn new(theta: f64, delta: f64, spacing: f64, num_antennas: usize) -> Result<Self> {
        let p = Self {
            theta,
            delta,
            spacing,
            num_antennas,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_degrees(theta_deg: f64, delta_deg: f64, spacing: f64, num_antennas: usize) -> Result<Self> {
        Self::new(theta_deg.to_radians(), delta_deg.to_radians(), spacing, num_antennas)
    }

    pub fn validate(&self) -> Result<()> {
        // small slack so degree conversions of ±90° are accepted
        let eps = 1e-12;
        if !(self.theta.abs() <= FRAC_PI_2 + eps) {
            return Err(Error::InvalidInput(format!(
                "angle of departure {} rad outside [-pi/2, pi/2]",
                self.theta
            )));
        }
        if !(self.delta > 0.0 && self.delta <= FRAC_PI_2 + eps) {
            return Err(Error::InvalidInput(format!(
                "angular spread {} rad outside (0, pi/2]",
                self.delta
            )));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidInput(format!("antenna spacing {} must be positive", self.spacing)));
        }
        if self.num_antennas == 0 {
            return Err(Error::InvalidInput("array needs at least one antenna".into()));
        }
        Ok(())
    }

    /// Length of the spectral support, `D (max sin - min sin)` over the
    /// angular range, capped at the full band.
    pub fn support_length(&self) -> f64 {
        let (lo, hi) = self.projected_range();
        (hi - lo).min(1.0)
    }

    /// Range of `D sin(phi)` for `phi` in `[theta - delta, theta + delta]`.
    pub(crate) fn projected_range(&self) -> (f64, f64) {
        let a = self.theta - self.delta;
        let b = self.theta + self.delta;
        let (sa, sb) = (a.sin(), b.sin());
        let mut lo = sa.min(sb);
        let mut hi = sa.max(sb);
        if a <= FRAC_PI_2 && FRAC_PI_2 <= b {
            hi = 1.0;
        }
        if a <= -FRAC_PI_2 && -FRAC_PI_2 <= b {
            lo = -1.0;
        }
        (self.spacing * lo, self.spacing * hi)
    }
}

/// Hermitian positive semidefinite transmit covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: CMatrix,
    trace_normalized: bool,
}

impl CovarianceMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const PSD_TOL: f64 = 1e-8;
    pub const TRACE_TOL: f64 = 1e-8;

    /// Validates Hermitian symmetry, positive semidefiniteness and, when
    /// `trace_normalized` is set, `tr(R) = M`.
    pub fn new(entries: CMatrix, trace_normalized: bool) -> Result<Self> {
        linalg::ensure_square(&entries, "covariance")?;
        let m = entries.nrows();
        if m == 0 {
            return Err(Error::InvalidInput("covariance must be at least 1x1".into()));
        }
        let scale = linalg::max_abs(&entries).max(1.0);
        let defect = linalg::hermitian_defect(&entries);
        if defect > Self::HERMITIAN_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "covariance is not Hermitian (defect {defect:.3e})"
            )));
        }
        let eig = linalg::hermitian_eigenvalues(&entries);
        let (max, min) = (eig[0], eig[m - 1]);
        if min < -Self::PSD_TOL * max.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidInput(format!(
                "covariance is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        if trace_normalized {
            let tr = entries.trace().re;
            if (tr - m as f64).abs() > Self::TRACE_TOL * m as f64 {
                return Err(Error::InvalidInput(format!(
                    "trace {tr} differs from the array size {m}"
                )));
            }
        }
        Ok(Self {
            entries,
            trace_normalized,
        })
    }

    pub(crate) fn from_parts_unchecked(entries: CMatrix, trace_normalized: bool) -> Self {
        Self {
            entries,
            trace_normalized,
        }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_parts_unchecked(CMatrix::identity(m, m), true)
    }

    /// Rescales so that `tr(R) = M`.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.dim() as f64;
        let tr = self.entries.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidInput("cannot normalise a zero-trace covariance".into()));
        }
        Ok(Self::from_parts_unchecked(&self.entries * c(m / tr, 0.0), true))
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_trace_normalized(&self) -> bool {
        self.trace_normalized
    }

    /// `log2 det R`; `-inf` for singular covariances.
    pub fn log2_det(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.entries)
            .iter()
            .map(|&l| if l > 0.0 { l.log2() } else { f64::NEG_INFINITY })
            .sum()
    }
}

/// Karhunen–Loève factor of one group covariance: an `M x r` basis with
/// orthonormal columns and the matching nonzero eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupEigenStructure {
    basis: CMatrix,
    eigenvalues: Vec<f64>,
}

impl GroupEigenStructure {
    pub const ORTHONORMAL_TOL: f64 = 1e-8;

    pub fn new(basis: CMatrix, eigenvalues: Vec<f64>) -> Result<Self> {
        if basis.ncols() != eigenvalues.len() {
            return Err(Error::InvalidInput(format!(
                "basis has {} columns but {} eigenvalues were given",
                basis.ncols(),
                eigenvalues.len()
            )));
        }
        if eigenvalues.is_empty() {
            return Err(Error::InvalidInput("group rank must be at least 1".into()));
        }
        if basis.ncols() > basis.nrows() {
            return Err(Error::InvalidInput("basis must be tall".into()));
        }
        if let Some(bad) = eigenvalues.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidInput(format!("eigenvalue {bad} is not strictly positive")));
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("eigenvalues must be nonincreasing".into()));
        }
        let defect = linalg::orthonormality_defect(&basis);
        if defect > Self::ORTHONORMAL_TOL {
            return Err(Error::InvalidInput(format!(
                "basis columns are not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self { basis, eigenvalues })
    }

    /// `R = I_M` written as a single full-rank group.
    pub fn identity(m: usize) -> Self {
        Self {
            basis: CMatrix::identity(m, m),
            eigenvalues: vec![1.0; m],
        }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn log2_det(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.log2()).sum()
    }

    /// `U Λ^{1/2}`, the `M x r` channel colouring factor.
    pub fn factor(&self) -> CMatrix {
        let mut f = self.basis.clone();
        for (j, l) in self.eigenvalues.iter().enumerate() {
            let s = l.sqrt();
            f.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        f
    }

    /// `U Λ U^H`.
    pub fn covariance(&self) -> CMatrix {
        let f = self.factor();
        &f * f.adjoint()
    }
}

/// Groups whose eigenbases are mutually orthogonal and share `M` and `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryEnsemble {
    groups: Vec<GroupEigenStructure>,
}

impl UnitaryEnsemble {
    pub const ORTHOGONALITY_TOL: f64 = 1e-8;

    pub fn new(groups: Vec<GroupEigenStructure>) -> Result<Self> {
        let first = groups
            .first()
            .ok_or_else(|| Error::InvalidInput("ensemble needs at least one group".into()))?;
        let (m, r) = (first.dim(), first.rank());
        if groups.iter().any(|g| g.dim() != m || g.rank() != r) {
            return Err(Error::InvalidInput("all groups must share array size and rank".into()));
        }
        if r * groups.len() > m {
            return Err(Error::Geometry(format!(
                "{} groups of rank {r} do not fit in {m} dimensions",
                groups.len()
            )));
        }
        for (i, a) in groups.iter().enumerate() {
            for b in &groups[i + 1..] {
                let cross = a.basis().adjoint() * b.basis();
                let leak = linalg::max_abs(&cross);
                if leak > Self::ORTHOGONALITY_TOL {
                    return Err(Error::StructureViolation(format!(
                        "group eigenspaces overlap (max |U_g^H U_h| = {leak:.3e})"
                    )));
                }
            }
        }
        Ok(Self { groups })
    }

    pub fn groups(&self) -> &[GroupEigenStructure] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn dim(&self) -> usize {
        self.groups[0].dim()
    }

    pub fn rank(&self) -> usize {
        self.groups[0].rank()
    }

    /// `[U_1, ..., U_G]`.
    pub fn stacked_basis(&self) -> CMatrix {
        let m = self.dim();
        let r = self.rank();
        let mut out = CMatrix::zeros(m, r * self.groups.len());
        for (g, grp) in self.groups.iter().enumerate() {
            out.view_mut((0, g * r), (m, r)).copy_from(grp.basis());
        }
        out
    }

    /// Per-group eigenvalue lists.
    pub fn profiles(&self) -> Vec<Vec<f64>> {
        self.groups.iter().map(|g| g.eigenvalues().to_vec()).collect()
    }
}
