use std::f64::consts::LN_2;

use nalgebra::{Cholesky, DMatrix, DVector};

use super::rate::PowerAllocation;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};

pub const DEFAULT_TOL_BITS: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Outcome of a converged waterfilling run.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillSolution {
    pub allocation: PowerAllocation,
    pub rate_bits: f64,
    pub gap_bits: f64,
    pub iterations: usize,
}

struct BlockState {
    h: CMatrix,
    offset: usize,
    inv: CMatrix,
}

/// Evaluates `ln det(I + H_b diag(p) H_b^H)` and refreshes the inverse for
/// every block.
fn refresh(blocks: &mut [BlockState], p: &[f64]) -> Option<f64> {
    let mut total = 0.0;
    for b in blocks.iter_mut() {
        let n = b.h.nrows();
        let mut cov = CMatrix::identity(n, n);
        for j in 0..b.h.ncols() {
            let pj = p[b.offset + j];
            if pj > 0.0 {
                let col = b.h.column(j);
                cov.gerc(c(pj, 0.0), &col, &col, c(1.0, 0.0));
            }
        }
        let chol = Cholesky::new(cov)?;
        let l = chol.l_dirty();
        total += (0..n).map(|i| 2.0 * l[(i, i)].re.ln()).sum::<f64>();
        b.inv = chol.inverse();
    }
    Some(total)
}

/// `h_k^H A h_k` for every user at the current inverses.
fn gains(blocks: &[BlockState], out: &mut [f64]) {
    for b in blocks {
        for j in 0..b.h.ncols() {
            let col = b.h.column(j);
            let v = &b.inv * col;
            out[b.offset + j] = col.dotc(&v).re.max(0.0);
        }
    }
}

/// Sum-power waterfilling for the dual uplink of a MIMO broadcast channel:
/// maximises `log2 det(I + Σ_k p_k h_k h_k^H)` over `Σ p_k ≤ P`.
///
/// Users are updated cyclically (lowest index first) against a common
/// water level, which is re-tuned to the budget after each sweep. The run
/// stops once the duality gap `P·max_k g_k − Σ_k p_k g_k` (with
/// `g_k = h_k^H (I + Σ p h h^H)^{-1} h_k`) falls below `tol` bits; this gap
/// bounds the distance to the optimum.
pub fn sum_power_waterfill(channels: &CMatrix, budget: f64, tol: f64, max_iter: usize) -> Result<PowerAllocation> {
    waterfill_blocks(std::slice::from_ref(channels), budget, tol, max_iter).map(|s| s.allocation)
}

/// As [`sum_power_waterfill`] for block-diagonal channels that share one
/// budget. Powers are returned block after block.
pub fn sum_power_waterfill_blocks(
    blocks: &[CMatrix],
    budget: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PowerAllocation> {
    waterfill_blocks(blocks, budget, tol, max_iter).map(|s| s.allocation)
}

pub fn waterfill_blocks(blocks: &[CMatrix], budget: f64, tol: f64, max_iter: usize) -> Result<WaterfillSolution> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidInput(format!("power budget {budget} must be positive")));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidInput("tolerance and iteration cap must be positive".into()));
    }
    let mut state = Vec::with_capacity(blocks.len());
    let mut offset = 0;
    for h in blocks {
        state.push(BlockState {
            h: h.clone(),
            offset,
            inv: CMatrix::zeros(0, 0),
        });
        offset += h.ncols();
    }
    let k = offset;
    if k == 0 {
        return Err(Error::InvalidInput("no users".into()));
    }
    let non_finite = || Error::InvalidInput("channel contains non-finite entries".into());

    let mut p = vec![budget / k as f64; k];
    let mut g = vec![0.0; k];
    let mut rate = refresh(&mut state, &p).ok_or_else(non_finite)?;
    gains(&state, &mut g);
    if g.iter().all(|&x| x <= 0.0) {
        // all channels vanish; every allocation is optimal
        return Ok(WaterfillSolution {
            allocation: PowerAllocation::uniform(k, budget),
            rate_bits: 0.0,
            gap_bits: 0.0,
            iterations: 0,
        });
    }

    let mut best = (p.clone(), rate);
    let mut gap = duality_gap(&p, &g, budget);
    let mut v = CVector::zeros(0);

    for iter in 1..=max_iter {
        if gap < tol {
            return Ok(WaterfillSolution {
                allocation: PowerAllocation { powers: p, budget },
                rate_bits: rate / LN_2,
                gap_bits: gap,
                iterations: iter - 1,
            });
        }

        // cyclic sweep at the water level implied by the current gradient
        let inner: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        let water = budget / inner;
        for b in state.iter_mut() {
            let n = b.h.nrows();
            if v.len() != n {
                v = CVector::zeros(n);
            }
            for j in 0..b.h.ncols() {
                let idx = b.offset + j;
                let col = b.h.column(j);
                v.gemv(c(1.0, 0.0), &b.inv, &col, c(0.0, 0.0));
                let s = col.dotc(&v).re;
                let pk = p[idx];
                let a = s / (1.0 - pk * s);
                let new = if a > 0.0 && a.is_finite() { (water - 1.0 / a).max(0.0) } else { 0.0 };
                let delta = new - pk;
                if delta != 0.0 {
                    let denom = 1.0 + delta * s;
                    b.inv.gerc(c(-delta / denom, 0.0), &v, &v, c(1.0, 0.0));
                    p[idx] = new;
                }
            }
        }
        let total: f64 = p.iter().sum();
        if total > 0.0 {
            let scale = budget / total;
            p.iter_mut().for_each(|x| *x *= scale);
        } else {
            p.copy_from_slice(&best.0);
        }
        rate = refresh(&mut state, &p).ok_or_else(non_finite)?;
        gains(&state, &mut g);
        gap = duality_gap(&p, &g, budget);
        if rate > best.1 {
            best = (p.clone(), rate);
        }
        if gap < tol {
            continue;
        }

        // Newton steps on the face spanned by the active users
        for _ in 0..NEWTON_STEPS {
            match newton_step(&state, &p, &g, rate) {
                Some((next, next_rate)) => {
                    p = next;
                    rate = refresh(&mut state, &p).ok_or_else(non_finite)?;
                    debug_assert!((rate - next_rate).abs() < 1e-6 * rate.abs().max(1.0));
                    gains(&state, &mut g);
                    gap = duality_gap(&p, &g, budget);
                    if rate > best.1 {
                        best = (p.clone(), rate);
                    }
                    if gap < tol {
                        break;
                    }
                }
                None => break,
            }
        }
    }
    if gap < tol {
        return Ok(WaterfillSolution {
            allocation: PowerAllocation { powers: p, budget },
            rate_bits: rate / LN_2,
            gap_bits: gap,
            iterations: max_iter,
        });
    }
    Err(Error::Convergence {
        iterations: max_iter,
        gap_bits: gap,
        best: PowerAllocation {
            powers: best.0,
            budget,
        },
    })
}

const NEWTON_STEPS: usize = 4;
const NEWTON_MAX_ACTIVE: usize = 256;

/// Frank–Wolfe gap `P max_k g_k - Σ_k p_k g_k`, converted to bits.
fn duality_gap(p: &[f64], g: &[f64], budget: f64) -> f64 {
    let gmax = g.iter().copied().fold(0.0, f64::max);
    let inner: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
    (budget * gmax - inner).max(0.0) / LN_2
}

fn ln_det_at(state: &[BlockState], p: &[f64]) -> Option<f64> {
    let mut total = 0.0;
    for b in state {
        let n = b.h.nrows();
        let mut cov = CMatrix::identity(n, n);
        for j in 0..b.h.ncols() {
            let pj = p[b.offset + j];
            if pj > 0.0 {
                let col = b.h.column(j);
                cov.gerc(c(pj, 0.0), &col, &col, c(1.0, 0.0));
            }
        }
        total += crate::linalg::ln_det_hpd(&cov)?;
    }
    Some(total)
}

/// One damped Newton step of `ln det` restricted to `{p_S ≥ 0, Σ p_S = P}`
/// for the active set `S`. Returns `None` when no ascent is possible.
fn newton_step(state: &[BlockState], p: &[f64], g: &[f64], rate: f64) -> Option<(Vec<f64>, f64)> {
    // (user index, block index)
    let mut active = Vec::new();
    for (bi, b) in state.iter().enumerate() {
        for j in 0..b.h.ncols() {
            if p[b.offset + j] > 0.0 {
                active.push((b.offset + j, bi));
            }
        }
    }
    let n = active.len();
    if !(2..=NEWTON_MAX_ACTIVE).contains(&n) {
        return None;
    }
    let vecs: Vec<CVector> = active
        .iter()
        .map(|&(u, bi)| {
            let b = &state[bi];
            &b.inv * b.h.column(u - b.offset)
        })
        .collect();
    // KKT system [H 1; 1^T 0] [d; -ν] = [-g; 0] with H = -|h_i^H A h_j|^2
    let mut kkt = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut rhs = DVector::<f64>::zeros(n + 1);
    let mut diag_max = 0.0f64;
    for a in 0..n {
        let (ua, ba) = active[a];
        let ha = state[ba].h.column(ua - state[ba].offset);
        for bcol in a..n {
            let bb = active[bcol].1;
            if ba != bb {
                continue;
            }
            let hij = -ha.dotc(&vecs[bcol]).norm_sqr();
            kkt[(a, bcol)] = hij;
            kkt[(bcol, a)] = hij;
        }
        diag_max = diag_max.max(-kkt[(a, a)]);
        kkt[(a, n)] = 1.0;
        kkt[(n, a)] = 1.0;
        rhs[a] = -g[ua];
    }
    // light damping keeps the system solvable when |S| exceeds the rank
    let damp = 1e-12 * diag_max.max(f64::MIN_POSITIVE);
    for a in 0..n {
        kkt[(a, a)] -= damp;
    }
    let sol = kkt.lu().solve(&rhs)?;
    let d: Vec<f64> = (0..n).map(|a| sol[a]).collect();
    let slope: f64 = (0..n).map(|a| g[active[a].0] * d[a]).sum();
    if !(slope > 0.0) || d.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let mut alpha_max = f64::INFINITY;
    let mut blocking = None;
    for a in 0..n {
        if d[a] < 0.0 {
            let lim = p[active[a].0] / -d[a];
            if lim < alpha_max {
                alpha_max = lim;
                blocking = Some(a);
            }
        }
    }
    let mut alpha = alpha_max.min(1.0);
    for _ in 0..40 {
        let mut next = p.to_vec();
        for a in 0..n {
            next[active[a].0] = (p[active[a].0] + alpha * d[a]).max(0.0);
        }
        if alpha == alpha_max {
            if let Some(a) = blocking {
                next[active[a].0] = 0.0;
            }
        }
        let total: f64 = next.iter().sum();
        let budget: f64 = p.iter().sum();
        next.iter_mut().for_each(|x| *x *= budget / total);
        if let Some(r) = ln_det_at(state, &next) {
            if r > rate {
                return Some((next, r));
            }
        }
        alpha *= 0.5;
    }
    None
}
