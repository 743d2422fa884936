use tcd_core::capacity::{simulate_sum_capacity, Mode, UserPopulation};
use tcd_core::channel_models::synthesize_unitary_ensemble;
use tcd_core::experiments::{run, ExperimentConfig, ExperimentId, GeometrySpec, ResultTable};

fn values(t: &ResultTable, series: &str, params: &str) -> Vec<(f64, f64)> {
    t.select(series, params).map(|r| (r.x, r.value)).collect()
}

#[test]
fn same_seed_same_table() {
    let mut c = ExperimentConfig::new(ExperimentId::Fig3).with_trials(30).with_seed(77);
    c.snr_db = Some(vec![10.0, 30.0]);
    let a = run(&c).unwrap();
    let b = run(&c).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    c.seed = 78;
    assert_ne!(run(&c).unwrap().to_csv().unwrap(), a.to_csv().unwrap());
}

#[test]
fn thread_count_does_not_change_results() {
    let ens = synthesize_unitary_ensemble(4, 2, 2, &[vec![3.0, 1.0]], 2).unwrap();
    let pop = UserPopulation::Unitary(ens);
    let go = || simulate_sum_capacity(4, 6, &pop, 10.0, 64, 3, Mode::Full, Default::default()).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(go);
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(go);
    assert_eq!(one, three);
}

#[test]
fn fig2_flat_profile_above_skewed() {
    let mut c = ExperimentConfig::new(ExperimentId::Fig2).with_trials(200);
    c.snr_db = Some(vec![20.0, 30.0]);
    c.geometry = Some(GeometrySpec { m: 8, k: 8, g: 4, r: 2, tc: 100 });
    let t = run(&c).unwrap();
    let flat = values(&t, "simul", "lambda=4,4");
    let skew = values(&t, "simul", "lambda=7,1");
    for (f, s) in flat.iter().zip(&skew) {
        assert!(f.1 > s.1, "{f:?} vs {s:?}");
    }
    let analy = values(&t, "analy", "lambda=4,4");
    assert!((flat[1].1 - analy[1].1).abs() <= 1.5);
}

#[test]
fn fig4_curves_grow_with_users() {
    let mut c = ExperimentConfig::new(ExperimentId::Fig4).with_trials(100);
    c.k_grid = Some(vec![4, 16, 64]);
    let t = run(&c).unwrap();
    for s in ["iid", "unitary", "one_ring"] {
        for m in ["M=4;", "M=8;"] {
            let rows: Vec<_> = t.select(s, m).collect();
            assert_eq!(rows.len(), 3);
            for w in rows.windows(2) {
                let tol = 3.0 * (w[0].std_error.unwrap().powi(2) + w[1].std_error.unwrap().powi(2)).sqrt();
                assert!(w[1].value >= w[0].value - tol, "{s} {m}: {} then {}", w[0].value, w[1].value);
            }
        }
    }
}

#[test]
fn fig_fq_optimum_and_shape() {
    let t = run(&ExperimentConfig::new(ExperimentId::FigFq).with_trials(0)).unwrap();
    for mu in ["mu=2;", "mu=5;"] {
        for db in ["P_db=10", "P_db=20", "P_db=30"] {
            let key = format!("{mu}M=200");
            let prof: Vec<(f64, f64)> =
                t.select("f_q", &key).filter(|r| r.params.ends_with(db)).map(|r| (r.x, r.value)).collect();
            let opt = t.select("m_p2_star", &key).find(|r| r.params.ends_with(db)).unwrap();
            let star = t.select("m_star", &key).find(|r| r.params.ends_with(db)).unwrap();
            let brute = prof.iter().cloned().fold((0.0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
            assert_eq!((opt.x, opt.value), brute);
            assert!(opt.x >= star.x);
            for w in prof.iter().filter(|p| p.0 >= opt.x).collect::<Vec<_>>().windows(2) {
                assert!(w[1].1 <= w[0].1);
            }
        }
    }
}

#[test]
fn fig_pilot_system2_dominates_and_gap_grows() {
    let t = run(&ExperimentConfig::new(ExperimentId::FigPilot).with_trials(0)).unwrap();
    let gap = |tc: &str| -> Vec<f64> {
        let s1 = values(&t, "system1", tc);
        let s2 = values(&t, "system2", tc);
        s1.iter().zip(&s2).map(|(a, b)| {
            assert_eq!(a.0, b.0);
            b.1 - a.1
        }).collect()
    };
    let g32 = gap("Tc=32;");
    let g128 = gap("Tc=128;");
    assert!(g32.iter().chain(&g128).all(|g| *g >= -1e-9));
    for (a, b) in g32.iter().zip(&g128) {
        assert!(b >= a, "{a} vs {b}");
    }
}
