use std::f64::consts::LOG2_E;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Harmonic number `H_n = Σ_{ℓ=1}^n 1/ℓ`, summed smallest term first with
/// compensation. `H_0 = 0`.
pub fn harmonic(n: usize) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for l in (1..=n).rev() {
        let x = 1.0 / l as f64;
        let t = sum + x;
        comp += if sum.abs() >= x { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

/// `Σ_{ℓ=a}^{b} 1/ℓ`, zero for an empty range.
pub fn harmonic_range(a: usize, b: usize) -> f64 {
    if b < a.max(1) {
        return 0.0;
    }
    harmonic(b) - harmonic(a.max(1) - 1)
}

/// Digamma at a positive integer, `ψ(n) = -γ + H_{n-1}` (nats).
pub fn harmonic_psi(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("psi is only defined here for n >= 1".into()));
    }
    Ok(-EULER_GAMMA + harmonic(n - 1))
}

/// `[ψ(1), ..., ψ(n)]` by the recurrence `ψ(ℓ+1) = ψ(ℓ) + 1/ℓ`.
pub fn psi_table(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut v = -EULER_GAMMA;
    for l in 1..=n {
        out.push(v);
        v += 1.0 / l as f64;
    }
    out
}

/// `κ(x, y) = yG(-γ + Σ_{ℓ=2}^x 1/ℓ + ((x-y)/y) Σ_{ℓ=x-y+1}^x 1/ℓ) log2 e`,
/// in bits.
pub fn kappa(x: usize, y: usize, g: usize) -> Result<f64> {
    if y == 0 || y > x || g == 0 {
        return Err(Error::Domain(format!("kappa needs 1 <= y <= x and G >= 1 (x={x}, y={y}, G={g})")));
    }
    let (xf, yf) = (x as f64, y as f64);
    let h_x = harmonic(x);
    let tail = h_x - harmonic(x - y);
    let inner = -EULER_GAMMA + (h_x - 1.0) + (xf - yf) / yf * tail;
    Ok(yf * g as f64 * inner * LOG2_E)
}

/// `E[ln det(W W^H)]` for an `m x n` matrix of i.i.d. `CN(0,1)` entries,
/// `Σ_{ℓ=0}^{m-1} ψ(n-ℓ)` nats.
pub fn wishart_logdet_mean(m: usize, n: usize) -> Result<f64> {
    if m == 0 || n < m {
        return Err(Error::Domain(format!("need n >= m >= 1 (m={m}, n={n})")));
    }
    let table = psi_table(n);
    Ok((0..m).map(|l| table[n - l - 1]).sum())
}

/// Truncated asymptotic expansion
/// `H_n ≈ γ + ln n + 1/(2n) - 1/(12n²) + 1/(120n⁴)`.
pub fn harmonic_expansion(n: usize) -> f64 {
    let x = n as f64;
    EULER_GAMMA + x.ln() + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x) + 1.0 / (120.0 * x.powi(4))
}

/// Power-offset advantage (dB) of the flat-profile unitary ensemble over
/// i.i.d. fading at `r = K'`, from the truncated harmonic expansion:
/// `3(1/(2r) - 1/(12r²) - 1/(2M) + 1/(12M²)) log2 e`.
pub fn marginal_gain_estimate(m: usize, r: usize) -> f64 {
    let (m, r) = (m as f64, r as f64);
    3.0 * (1.0 / (2.0 * r) - 1.0 / (12.0 * r * r) - 1.0 / (2.0 * m) + 1.0 / (12.0 * m * m)) * LOG2_E
}

/// Cap `3/(2r) log2 e` dB on that advantage.
pub fn marginal_gain_cap(r: usize) -> f64 {
    3.0 / (2.0 * r as f64) * LOG2_E
}
