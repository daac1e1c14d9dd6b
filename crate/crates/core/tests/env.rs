use std::sync::Arc;

use armpa_core::env::{
    collision_boundary, BoundaryModel, CellClass, CurrentConfig, CurrentField, DynamicState, Environment, ObstacleSpec,
    Vortex,
};
use armpa_core::geometry::{Aabb, Vec3};
use armpa_core::scenarios::{classified_grid, scenario_two_map};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vortex() -> impl Strategy<Value = Vortex<f64>> {
    (0.0..3500.0f64, 0.0..3500.0f64, -120.0..120.0f64, 50.0..500.0f64)
        .prop_map(|(x, y, strength, radius)| Vortex { x, y, strength, radius, gamma: 0.01 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lamb_vortex_is_tangential_with_closed_form_speed(v in vortex(), px in 0.0..3500.0f64, py in 0.0..3500.0f64) {
        let (u, w) = v.horizontal(px, py);
        let (dx, dy) = (px - v.x, py - v.y);
        let r = dx.hypot(dy);
        prop_assume!(r > 1e-3);
        let speed = v.strength.abs() / (2.0 * std::f64::consts::PI * r) * (1.0 - (-(r * r) / (v.radius * v.radius)).exp());
        prop_assert!((u.hypot(w) - speed).abs() <= 1e-9 * speed.max(1e-12));
        prop_assert!((u * dx + w * dy).abs() <= 1e-9 * speed.max(1e-12) * r);
        // positive circulation turns counter-clockwise
        let cross = dx * w - dy * u;
        prop_assert!(cross * v.strength >= 0.0);
    }

    #[test]
    fn layer_velocity_superposes_vortices(vs in prop::collection::vec(vortex(), 1..6), px in 0.0..3500.0f64, py in 0.0..3500.0f64, z in 0.0..100.0f64) {
        let bounds = Aabb { min: Vec3::new(0.0, 0.0, 0.0), max: Vec3::new(3500.0, 3500.0, 100.0) };
        let field = CurrentField::uniform_layers(bounds, 10.0, vs.clone());
        let got = field.velocity_at(Vec3::new(px, py, z)).unwrap();
        let (mut u, mut v, mut w) = (0.0, 0.0, 0.0);
        for vx in &vs {
            let (a, b) = vx.horizontal(px, py);
            u += a;
            v += b;
            w += vx.vertical(px, py);
        }
        prop_assert!((got.x - u).abs() < 1e-9 && (got.y - v).abs() < 1e-9 && (got.z - w).abs() < 1e-9);
    }

    #[test]
    fn collision_boundary_grows_linearly(r in 1.0..200.0f64, ru in 0.0..50.0f64, steps in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let spec = ObstacleSpec { static_count: 1, buoyant_count: 0, ..ObstacleSpec::default() };
        let grid = armpa_core::env::TraversabilityGrid::open_water(350, 350, 10.0).unwrap();
        let env = Environment::calm(Arc::new(grid), 100.0)
            .spawn(&spec, Vec3::new(100.0, 100.0, 50.0), Vec3::new(3400.0, 3400.0, 50.0), &mut rng)
            .unwrap();
        let mut o = env.obstacles()[0].clone();
        o.radius = r;
        o.radius_uncertainty = ru;
        let m = BoundaryModel::default();
        let b0 = collision_boundary(&o, 0, &m);
        let b1 = collision_boundary(&o, 1, &m);
        let bn = collision_boundary(&o, steps, &m);
        prop_assert!((b0 - (r + m.z * ru)).abs() < 1e-9);
        prop_assert!((bn - (b0 + steps as f64 * (b1 - b0))).abs() < 1e-6);
    }
}

#[test]
fn evolution_is_a_pure_function_of_state_and_stream() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let field = CurrentField::<f64>::generate(&CurrentConfig::default(), (3500.0, 3500.0), &mut rng).unwrap();
    assert!((5..=8).contains(&field.vortex_count()));
    assert_eq!(field.layers.len(), 11);
    let a = field.evolve(&mut ChaCha8Rng::seed_from_u64(9));
    let b = field.evolve(&mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(a, b);
    assert_ne!(a.layers, field.layers);
    assert_eq!(a.step, field.step + 1);
}

#[test]
fn four_noisy_steps_give_distinct_snapshots() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut field = CurrentField::<f64>::generate(&CurrentConfig::default(), (3500.0, 3500.0), &mut rng).unwrap();
    let mut seen = vec![field.layers.clone()];
    for _ in 0..4 {
        field = field.evolve(&mut rng);
        assert!(!seen.contains(&field.layers));
        seen.push(field.layers.clone());
    }
}

#[test]
fn dynamic_state_json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = classified_grid::<f64, _>(&scenario_two_map(), &mut rng).unwrap();
    let current = CurrentField::generate(&CurrentConfig::default(), grid.extent(), &mut rng).unwrap();
    let env = Environment::new(Arc::new(grid), current)
        .spawn(&ObstacleSpec::default(), Vec3::new(300.0, 400.0, 30.0), Vec3::new(3100.0, 2900.0, 70.0), &mut rng)
        .unwrap()
        .evolve(&mut rng);
    let mut buf = Vec::new();
    env.state.write_json(&mut buf).unwrap();
    assert!(DynamicState::<f64>::read_json(buf.as_slice()).unwrap() == env.state);
}

#[test]
fn clustered_map_puts_island_centres_on_coast() {
    let map = scenario_two_map::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = classified_grid(&map, &mut rng).unwrap();
    for is in &map.islands {
        assert_eq!(grid.class_at(is.x, is.y), Some(CellClass::Coast));
    }
    let water = grid.count(CellClass::Water) as f64 / (grid.width() * grid.height()) as f64;
    assert!(water > 0.7, "water share {water}");
}
