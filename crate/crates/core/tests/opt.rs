use armpa_core::opt::{optimize, EngineConfig, EngineKind, FnProblem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum()
}

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter().map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos()).sum::<f64>()
}

#[test]
fn every_engine_converges_on_a_shifted_sphere() {
    let p = FnProblem { bounds: vec![(-5.0, 5.0); 6], f: sphere };
    for engine in EngineKind::ALL {
        let mut cfg = EngineConfig::motion_default().with_engine(engine);
        // the exploratory swarm parameters stall early under the default stop rule
        cfg.stall_iterations = None;
        cfg.iterations = 300;
        let o = optimize(&cfg, &p, &mut ChaCha8Rng::seed_from_u64(1), &[]).unwrap();
        assert!(o.cost < 1e-2, "{engine}: {}", o.cost);
        assert_eq!(o.cost, sphere(&o.position));
    }
}

#[test]
fn engines_make_progress_on_rastrigin() {
    let p = FnProblem { bounds: vec![(-5.12, 5.12); 4], f: rastrigin };
    for engine in EngineKind::ALL {
        let cfg = EngineConfig::motion_default().with_engine(engine);
        let o = optimize(&cfg, &p, &mut ChaCha8Rng::seed_from_u64(2), &[]).unwrap();
        assert!(o.cost < o.trace.rows[0].best_cost, "{engine}");
        assert!(o.cost < 5.0, "{engine}: {}", o.cost);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn traces_are_monotone_and_seeded(seed in 0u64..10_000, e in 0usize..3, dim in 1usize..6) {
        let p = FnProblem { bounds: vec![(-3.0, 3.0); dim], f: rastrigin };
        let mut cfg = EngineConfig::mission_default().with_engine(EngineKind::ALL[e]);
        cfg.population = 12;
        cfg.iterations = 20;
        let a = optimize(&cfg, &p, &mut ChaCha8Rng::seed_from_u64(seed), &[]).unwrap();
        let b = optimize(&cfg, &p, &mut ChaCha8Rng::seed_from_u64(seed), &[]).unwrap();
        prop_assert_eq!(&a.position, &b.position);
        prop_assert!(a.trace.rows.windows(2).all(|w| w[1].best_cost <= w[0].best_cost));
        prop_assert!(a.position.iter().all(|x| (-3.0..=3.0).contains(x)));
        prop_assert_eq!(a.trace.rows.last().unwrap().best_cost, a.cost);
    }
}
