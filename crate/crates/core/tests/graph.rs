use std::collections::HashSet;

use armpa_core::env::TraversabilityGrid;
use armpa_core::scenarios::{random_world, WorldConfig};
use armpa_core::graph::{
    build_network, constructive_priorities, decode_route, generate_tasks, Decoded, NetworkConfig, Route, TaskGraph,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn network(seed: u64, nodes: usize, tasks: usize) -> TaskGraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = TraversabilityGrid::open_water(100, 100, 100.0).unwrap();
    build_network(&grid, nodes, generate_tasks(tasks, &mut rng), &NetworkConfig::default(), &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn decoded_routes_never_repeat(seed in 0u64..500, nodes in 2usize..40, u in prop::collection::vec(-100.0..100.0f64, 40)) {
        let g = network(seed, nodes, 20);
        match decode_route(&g, &u[..nodes]).unwrap() {
            Decoded::Route(r) => {
                prop_assert_eq!(r.nodes[0], g.start());
                prop_assert_eq!(*r.nodes.last().unwrap(), g.destination());
                prop_assert_eq!(r.nodes.iter().collect::<HashSet<_>>().len(), r.nodes.len());
                prop_assert_eq!(r.edges.iter().collect::<HashSet<_>>().len(), r.edges.len());
                for (w, &e) in r.nodes.windows(2).zip(&r.edges) {
                    prop_assert_eq!(g.edge_between(w[0], w[1]), Some(e));
                }
            }
            Decoded::DeadEnd(walk) => {
                let here = *walk.last().unwrap();
                prop_assert!(g.neighbors(here).iter().all(|(n, _)| walk.contains(n)));
            }
        }
    }

    #[test]
    fn route_time_ignores_edge_order(seed in 0u64..500, nodes in 3usize..30) {
        let g = network(seed, nodes, 15);
        let hop = g.hop_path(g.start(), g.destination()).unwrap();
        let r = Route::from_nodes(&g, hop).unwrap();
        let mut times: Vec<f64> = r.edges.iter().map(|&e| g.edge(e).time).collect();
        times.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let sum: f64 = times.iter().sum();
        prop_assert!((sum - r.time).abs() <= 1e-9 * r.time);
    }

    #[test]
    fn networks_are_connected_with_one_task_per_edge(seed in 0u64..200, nodes in 2usize..60) {
        let g = network(seed, nodes, 30);
        prop_assert!(g.reachable(g.start(), g.destination()));
        for n in 0..g.waypoint_count() {
            prop_assert!(g.reachable(g.start(), n));
        }
        let assigned: Vec<usize> = g.edges().iter().filter_map(|e| e.task).collect();
        prop_assert_eq!(assigned.iter().collect::<HashSet<_>>().len(), assigned.len());
        for e in g.edges() {
            let (a, b) = (g.position(e.a), g.position(e.b));
            prop_assert!((e.length - a.distance(b)).abs() < 1e-9);
            let expected = e.length / 2.5 + e.task.map_or(0.0, |t| g.tasks()[t].duration);
            prop_assert!((e.time - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn constructive_vector_gives_a_fewest_hop_route() {
    for seed in 0..30 {
        let g = network(seed, 40, 30);
        let u = constructive_priorities(&g).unwrap();
        let r = decode_route(&g, &u).unwrap().route().unwrap();
        assert_eq!(r.nodes.len(), g.hop_path(g.start(), g.destination()).unwrap().len());
    }
}

#[test]
fn json_round_trip_preserves_the_graph() {
    let g = network(5, 30, 30);
    let pruned = g.pruned(&[0, 1], &[3], g.start()).unwrap_or(g.clone());
    for graph in [g, pruned] {
        let mut buf = Vec::new();
        graph.write_json(&mut buf).unwrap();
        let back = TaskGraph::<f64>::read_json(buf.as_slice()).unwrap();
        assert_eq!(back, graph);
    }
}

#[test]
fn worlds_with_hidden_bays_still_connect() {
    // both seeds once left a waypoint group with no line of sight to the rest
    for seed in [705_549_376_362_425_742u64, 10_723_934_481_714_228_998] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_world::<f64, _>(&WorldConfig::default(), None, &mut rng).unwrap();
        assert!((30..=50).contains(&w.graph.waypoint_count()));
    }
}
