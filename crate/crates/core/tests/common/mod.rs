#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub type M = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn cn<R: Rng>(rng: &mut R) -> Complex64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> M {
    DMatrix::from_fn(rows, cols, |_, _| cn(rng))
}

/// `ln det` through the LU determinant, no Hermitian structure assumed.
pub fn ln_det(a: &M) -> f64 {
    a.clone().determinant().re.ln()
}

/// `log2 det(I + H diag(p) H^H)` evaluated directly.
pub fn rate_bits(h: &M, p: &[f64]) -> f64 {
    let m = h.nrows();
    let mut a = M::identity(m, m);
    for (k, &pk) in p.iter().enumerate() {
        let col = h.column(k);
        a += col * col.adjoint() * Complex64::new(pk, 0.0);
    }
    ln_det(&a) / std::f64::consts::LN_2
}

/// Random Hermitian PSD matrix `X X^H` with `X` of size `n x rank`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, rank: usize) -> M {
    let x = gaussian(rng, n, rank);
    &x * x.adjoint()
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
