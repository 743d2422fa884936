mod common;

use common::{gaussian, rate_bits, rng};
use proptest::prelude::*;
use tcd_core::capacity::{
    dual_mac_sum_rate, sum_power_waterfill, waterfill_blocks, PowerAllocation, DEFAULT_MAX_ITER, DEFAULT_TOL_BITS,
};

/// Best two-user split on a fine grid, refined by golden section.
fn two_user_optimum(h: &common::M, budget: f64) -> f64 {
    let f = |t: f64| rate_bits(h, &[t * budget, (1.0 - t) * budget]);
    let mut best = (0.0, f(0.0));
    for i in 0..=2000 {
        let t = i as f64 / 2000.0;
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let (mut a, mut b) = ((best.0 - 1e-3).max(0.0), (best.0 + 1e-3).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).max(best.1)
}

#[test]
fn matches_grid_search_for_two_users() {
    let mut r = rng(11);
    for (m, db) in [(1usize, 0.0), (2, 10.0), (3, 20.0), (2, -5.0)] {
        let h = gaussian(&mut r, m, 2);
        let p = 10f64.powf(db / 10.0);
        let alloc = sum_power_waterfill(&h, p, 1e-9, DEFAULT_MAX_ITER).unwrap();
        let got = dual_mac_sum_rate(&h, &alloc).unwrap();
        let want = two_user_optimum(&h, p);
        assert!((got - want).abs() < 1e-6, "M={m} {db} dB: {got} vs {want}");
    }
}

#[test]
fn rate_agrees_with_direct_determinant() {
    let mut r = rng(5);
    let h = gaussian(&mut r, 4, 6);
    let p = vec![0.5, 1.0, 0.0, 2.0, 0.25, 0.25];
    let alloc = PowerAllocation::new(p.clone(), 4.0).unwrap();
    assert!((dual_mac_sum_rate(&h, &alloc).unwrap() - rate_bits(&h, &p)).abs() < 1e-10);
}

#[test]
fn blocks_add_up() {
    let mut r = rng(8);
    let a = gaussian(&mut r, 2, 3);
    let b = gaussian(&mut r, 2, 3);
    let sol = waterfill_blocks(&[a.clone(), b.clone()], 20.0, DEFAULT_TOL_BITS, DEFAULT_MAX_ITER).unwrap();
    let (pa, pb) = sol.allocation.powers.split_at(3);
    let direct = rate_bits(&a, pa) + rate_bits(&b, pb);
    assert!((sol.rate_bits - direct).abs() < 1e-9);
    assert!((sol.allocation.total() - 20.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimum_dominates_random_allocations(seed in 0u64..10_000, m in 1usize..5, k in 1usize..7, db in -10.0f64..30.0) {
        let mut r = rng(seed);
        let h = gaussian(&mut r, m, k);
        let p = 10f64.powf(db / 10.0);
        let alloc = sum_power_waterfill(&h, p, DEFAULT_TOL_BITS, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(alloc.powers.iter().all(|&x| x >= 0.0));
        prop_assert!((alloc.total() - p).abs() <= 1e-9 * p.max(1.0));
        let opt = rate_bits(&h, &alloc.powers);
        for t in 0..5u64 {
            let mut rr = rng(seed ^ (t + 1) << 20);
            let w: Vec<f64> = (0..k).map(|_| rand::Rng::random::<f64>(&mut rr)).collect();
            let s: f64 = w.iter().sum();
            let q: Vec<f64> = w.iter().map(|x| x / s * p).collect();
            prop_assert!(rate_bits(&h, &q) <= opt + 1e-6);
        }
    }

    #[test]
    fn capacity_grows_with_budget(seed in 0u64..10_000, m in 1usize..4, k in 1usize..5) {
        let h = gaussian(&mut rng(seed), m, k);
        let lo = sum_power_waterfill(&h, 1.0, 1e-8, DEFAULT_MAX_ITER).unwrap();
        let hi = sum_power_waterfill(&h, 2.0, 1e-8, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(rate_bits(&h, &hi.powers) >= rate_bits(&h, &lo.powers) - 1e-7);
    }
}
