//! Quadrature rules: composite Gauss–Legendre for smooth oscillatory
//! integrands and tanh-sinh for integrands with endpoint singularities.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]` split into `panels` equal panels.
    pub fn integrate<T, F>(&self, f: F, a: f64, b: f64, panels: usize) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut total = T::default();
        for p in 0..panels {
            let lo = a + width * p as f64;
            let half = 0.5 * width;
            let mid = lo + half;
            let mut acc = T::default();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc = acc + f(mid + half * x) * *w;
            }
            total = total + acc * half;
        }
        total
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tanh-sinh (double exponential) quadrature of `f` over `[a, b]`.
///
/// `f` receives the abscissa together with its distances to the left and
/// right endpoints, computed without cancellation, so integrands with
/// `1/sqrt` or logarithmic endpoint singularities can be evaluated
/// accurately. Non-finite samples at the extreme tails are dropped.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    const T_MAX: f64 = 3.5;
    const MAX_LEVEL: u32 = 12;
    let half = 0.5 * (b - a);

    let sample = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let weight = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        // distance of the node to the nearer endpoint, scaled to [a, b]
        let gap = (b - a) / (1.0 + (2.0 * u.abs()).exp());
        if gap <= 0.0 || !weight.is_finite() {
            return 0.0;
        }
        let (x, dl, dr) = if t >= 0.0 {
            (b - gap, b - a - gap, gap)
        } else {
            (a + gap, gap, b - a - gap)
        };
        let v = f(x, dl, dr);
        if v.is_finite() {
            v * weight
        } else {
            0.0
        }
    };

    let mut h = 1.0;
    let mut sum = sample(0.0);
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        let t = k as f64 * h;
        sum += sample(t) + sample(-t);
        k += 1;
    }
    let mut estimate = half * h * sum;

    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            let t = k as f64 * h;
            sum += sample(t) + sample(-t);
            k += 2;
        }
        let next = half * h * sum;
        let converged = (next - estimate).abs() <= rel_tol * next.abs().max(1e-300);
        estimate = next;
        if converged {
            return Ok(estimate);
        }
    }
    Err(Error::Integration(format!(
        "tanh-sinh on [{a}, {b}] did not reach relative tolerance {rel_tol:e}"
    )))
}
