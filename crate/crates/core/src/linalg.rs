//! Dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::complex_normal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Matrix of i.i.d. `CN(0, 1)` entries, filled column by column.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Largest absolute deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn ensure_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidInput(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Hermitian eigendecomposition with eigenvalues sorted nonincreasing.
/// The input is symmetrised first so round-off asymmetry cannot leak into
/// the result.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), order.len());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, nonincreasing.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Natural log-determinant of a Hermitian positive definite matrix via
/// Cholesky. Returns `None` when the factorisation fails.
pub fn ln_det_hpd(m: &CMatrix) -> Option<f64> {
    let chol = nalgebra::Cholesky::new(m.clone())?;
    let l = chol.l_dirty();
    Some((0..m.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

/// Inverse of a Hermitian positive definite matrix.
pub fn inverse_hpd(m: &CMatrix) -> Option<CMatrix> {
    nalgebra::Cholesky::new(m.clone()).map(|chol| chol.inverse())
}

/// `|| U^H U - I ||_max` for a matrix with (intended) orthonormal columns.
pub fn orthonormality_defect(u: &CMatrix) -> f64 {
    let gram = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn ln_det_matches_eigen_product() {
        let mut rng = stream_rng(3, 0);
        let a = complex_gaussian(&mut rng, 5, 5);
        let m = &a * a.adjoint() + CMatrix::identity(5, 5);
        let ln = ln_det_hpd(&m).unwrap();
        let from_eig: f64 = hermitian_eigenvalues(&m).iter().map(|l| l.ln()).sum();
        assert!((ln - from_eig).abs() < 1e-10);
    }

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let mut rng = stream_rng(4, 0);
        let a = complex_gaussian(&mut rng, 4, 4);
        let m = &a * a.adjoint();
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let lam = CMatrix::from_diagonal(&CVector::from_iterator(4, vals.iter().map(|&l| c(l, 0.0))));
        let rec = &vecs * lam * vecs.adjoint();
        assert!(max_abs(&(rec - m)) < 1e-10);
    }
}
