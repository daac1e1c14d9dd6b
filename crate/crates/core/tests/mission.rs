mod oracles;

use armpa_core::graph::{build_network, generate_tasks, NetworkConfig, Route, TaskGraph};
use armpa_core::mission::{plan_mission, replan_mission, route_cost, time_violation, CostWeights, MissionBudget};
use armpa_core::opt::{EngineConfig, EngineKind};
use armpa_core::scenarios::{six_node_instance, SMALL_INSTANCES};
use armpa_core::env::TraversabilityGrid;
use armpa_core::Vec3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(seed: u64, nodes: usize) -> TaskGraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = TraversabilityGrid::open_water(100, 100, 100.0).unwrap();
    let tasks = generate_tasks(30, &mut rng);
    build_network(&grid, nodes, tasks, &NetworkConfig::default(), &mut rng).unwrap()
}

#[test]
fn library_cost_matches_recomputation_on_every_route() {
    for k in 0..SMALL_INSTANCES as u64 {
        let (g, budget) = six_node_instance::<f64>(k);
        for nodes in oracles::all_routes(&g) {
            let r = Route::from_nodes(&g, nodes.clone()).unwrap();
            let (cost, violation) = route_cost(&g, &r, &budget);
            let (t, c) = oracles::route_time_cost(&g, &nodes, budget.available);
            assert!((r.time - t).abs() <= 1e-9 * t);
            assert!((cost - c).abs() <= 1e-9 * c, "instance {k} route {nodes:?}");
            assert_eq!(violation == 0.0, r.time <= budget.available);
        }
    }
}

#[test]
fn each_engine_finds_the_enumerated_optimum_on_a_sample() {
    for k in [0u64, 7, 13] {
        let (g, budget) = six_node_instance::<f64>(k);
        let ((best, _, _), _) = oracles::enumerated_optimum(&g, budget.available);
        for engine in EngineKind::ALL {
            let cfg = EngineConfig::mission_default().with_engine(engine);
            let mut rng = ChaCha8Rng::seed_from_u64(k);
            let (plan, _) = plan_mission(&g, &budget, &cfg, &mut rng).unwrap();
            assert_eq!(plan.route.nodes, best, "instance {k} {engine}");
        }
    }
}

#[test]
fn only_route_is_returned_by_every_engine() {
    let w = vec![Vec3::zero(), Vec3::new(500.0, 0.0, 0.0)];
    let g = TaskGraph::from_parts(w, &[(0, 1, None)], vec![], 0, 1, 2.5).unwrap();
    for engine in EngineKind::ALL {
        let cfg = EngineConfig::mission_default().with_engine(engine);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (plan, _) = plan_mission(&g, &MissionBudget::new(100.0), &cfg, &mut rng).unwrap();
        assert_eq!(plan.route.nodes, vec![0, 1]);
        assert_eq!(plan.time, 200.0);
        assert_eq!(plan.violation, 0.5);
    }
}

#[test]
fn more_iterations_never_hurt() {
    let g = random_graph(3, 25);
    let budget = MissionBudget::new(20_000.0);
    for engine in EngineKind::ALL {
        let mut cfg = EngineConfig::mission_default().with_engine(engine);
        cfg.stall_iterations = None;
        let mut last = f64::INFINITY;
        for iters in [0, 10, 40, 100] {
            cfg.iterations = iters;
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let (plan, trace) = plan_mission(&g, &budget, &cfg, &mut rng).unwrap();
            assert!(trace.best_cost() <= last, "{engine} at {iters}");
            assert!(plan.violation == 0.0);
            last = trace.best_cost();
        }
    }
}

#[test]
fn pruned_replans_never_reuse_passed_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut cfg = EngineConfig::mission_default();
    cfg.population = 20;
    cfg.iterations = 10;
    let mut checked = 0;
    for scenario in 0..200u64 {
        let g = random_graph(1000 + scenario, rng.gen_range(8..20));
        let hop = g.hop_path(g.start(), g.destination()).unwrap();
        let steps = rng.gen_range(0..hop.len() - 1);
        let passed: Vec<usize> = hop[..=steps].windows(2).map(|w| g.edge_between(w[0], w[1]).unwrap()).collect();
        let here = hop[steps];
        let budget = MissionBudget::new(30_000.0);
        match replan_mission(&g, &passed, &[], here, &budget, &cfg, &mut rng) {
            Ok((pruned, plan, _)) => {
                assert!(pruned.active_count() <= g.active_count());
                assert_eq!(plan.route.nodes[0], here);
                for w in plan.route.nodes.windows(2) {
                    let e = g.edge_between(w[0], w[1]).unwrap();
                    assert!(!passed.contains(&e), "scenario {scenario}");
                }
                let visited: Vec<usize> = hop[..steps].to_vec();
                assert!(plan.route.nodes.iter().all(|n| !visited.contains(n)));
                checked += 1;
            }
            Err(armpa_core::Error::InfeasibleReplan { .. }) => {}
            Err(e) => panic!("scenario {scenario}: {e}"),
        }
    }
    assert!(checked > 100);
}

#[test]
fn mission_budget_rejects_non_positive_weights() {
    let mut b = MissionBudget::new(100.0);
    b.weights.violation = 0.0;
    assert!(b.validate().is_err());
    assert!(MissionBudget::new(-1.0).validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn violation_is_zero_iff_on_time(time in 1.0..1e5f64, avail in 1.0..1e5f64) {
        let v = time_violation(time, avail);
        prop_assert_eq!(v == 0.0, time <= avail);
        prop_assert!(time_violation(time * 1.01, avail) >= v);
        if time > avail {
            prop_assert!(time_violation(time * 1.01, avail) > v);
        }
    }

    /// Holds when every edge carries a task; a taskless edge adds a fixed 1
    /// to the weight sum, which does not scale with the priorities.
    #[test]
    fn priority_scaling_keeps_the_weight_only_argmin(k in 0..SMALL_INSTANCES as u64, scale in 0.1..50.0f64) {
        let (g, budget) = six_node_instance::<f64>(k);
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        let tasks = generate_tasks::<f64, _>(g.edges().len(), &mut rng);
        let links: Vec<_> = g.edges().iter().enumerate().map(|(i, e)| (e.a, e.b, Some(i))).collect();
        let build = |tasks: Vec<_>| {
            TaskGraph::from_parts(g.waypoints().to_vec(), &links, tasks, g.start(), g.destination(), g.speed()).unwrap()
        };
        let mut scaled = tasks.clone();
        for t in &mut scaled {
            t.priority *= scale;
        }
        let (g1, g2) = (build(tasks), build(scaled));
        let b = MissionBudget { weights: CostWeights { time_gap: Some(0.0), ..CostWeights::default() }, ..budget };
        let ranked = |g: &TaskGraph<f64>| {
            let mut v: Vec<(f64, Vec<usize>)> = oracles::all_routes(g)
                .into_iter()
                .map(|n| (route_cost(g, &Route::from_nodes(g, n.clone()).unwrap(), &b).0, n))
                .collect();
            v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            v
        };
        let (r1, r2) = (ranked(&g1), ranked(&g2));
        // ties may resolve either way: the scaled argmin must be optimal unscaled
        let alt = r1.iter().find(|(_, n)| *n == r2[0].1).unwrap().0;
        prop_assert!((alt - r1[0].0).abs() <= 1e-9 * r1[0].0, "{} vs {}", r1[0].0, alt);
    }

    #[test]
    fn plans_are_structurally_valid(seed in 0u64..1000, nodes in 5usize..30) {
        let g = random_graph(seed, nodes);
        let mut cfg = EngineConfig::mission_default().with_engine(EngineKind::ALL[(seed % 3) as usize]);
        cfg.population = 12;
        cfg.iterations = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (plan, _) = plan_mission(&g, &MissionBudget::new(10_000.0), &cfg, &mut rng).unwrap();
        prop_assert!(armpa_core::mission::is_structurally_valid(&g, &plan.route.nodes));
        prop_assert_eq!(plan.tasks.len(), plan.route.edges.len());
    }
}
