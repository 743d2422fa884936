use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Fiedler's bounds on `det(A + B)` for Hermitian `A`, `B` with
/// eigenvalues `α_1 ≥ ... ≥ α_n`, `β_1 ≥ ... ≥ β_n`:
/// `Π(α_i + β_i) ≤ det(A + B) ≤ Π(α_i + β_{n-i+1})`.
pub fn fiedler_det_bounds(a: &CMatrix, b: &CMatrix) -> Result<(f64, f64)> {
    linalg::ensure_square(a, "A")?;
    linalg::ensure_square(b, "B")?;
    if a.shape() != b.shape() {
        return Err(Error::Domain(format!("size mismatch {:?} vs {:?}", a.shape(), b.shape())));
    }
    let al = linalg::hermitian_eigenvalues(a);
    let be = linalg::hermitian_eigenvalues(b);
    let n = al.len();
    // rounding may push eigenvalues of singular PSD inputs slightly negative
    let scale = al.iter().chain(&be).fold(0.0f64, |m, x| m.max(x.abs()));
    if n > 0 && al[n - 1] + be[n - 1] < -1e-12 * scale {
        return Err(Error::Domain("A + B must have nonnegative smallest eigenvalue sum".into()));
    }
    let lower = (0..n).map(|i| al[i] + be[i]).product();
    let upper = (0..n).map(|i| al[i] + be[n - 1 - i]).product();
    Ok((lower, upper))
}
