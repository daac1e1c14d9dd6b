//! Canned environments and graphs used by the experiments and tests.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{
    classify_grid, cluster_map, CurrentConfig, CurrentField, Environment, Island, KMeansConfig, ObstacleSpec,
    SyntheticMap, TraversabilityGrid, UncertainBand,
};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::graph::{build_network, generate_tasks, NetworkConfig, Task, TaskGraph};
use crate::mission::MissionBudget;
use crate::scalar::{uniform, Real};

/// One motion-planning leg with its expected duration.
#[derive(Debug, Clone)]
pub struct MotionScenario<T> {
    pub env: Environment<T>,
    pub start: Vec3<T>,
    pub goal: Vec3<T>,
    /// Expected leg time in seconds.
    pub expected_time: T,
}

/// Side of the square motion-planning map in cells.
pub const MOTION_MAP_CELLS: usize = 350;
pub const MOTION_MAP_CELL_SIZE: f64 = 10.0;

fn motion_endpoints<T: Real>() -> (Vec3<T>, Vec3<T>) {
    (Vec3::new(T::of(300.0), T::of(400.0), T::of(30.0)), Vec3::new(T::of(3100.0), T::of(2900.0), T::of(70.0)))
}

/// Islands placed at least ~900 m from the straight start-goal corridor.
pub fn scenario_two_map<T: Real>() -> SyntheticMap<T> {
    let island = |x: f64, y: f64, r: f64| Island { x: T::of(x), y: T::of(y), radius: T::of(r) };
    SyntheticMap {
        width: MOTION_MAP_CELLS,
        height: MOTION_MAP_CELLS,
        cell_size: T::of(MOTION_MAP_CELL_SIZE),
        islands: vec![
            island(2600.0, 800.0, 350.0),
            island(700.0, 2600.0, 400.0),
            island(3300.0, 1500.0, 200.0),
            island(1500.0, 3200.0, 250.0),
        ],
        noise: T::of(0.05),
    }
}

/// Renders and clusters a synthetic map into a traversability grid.
pub fn classified_grid<T: Real, R: Rng + ?Sized>(map: &SyntheticMap<T>, rng: &mut R) -> Result<TraversabilityGrid<T>> {
    let intensity = map.render(rng)?;
    let model = cluster_map(&intensity, &KMeansConfig::default())?;
    classify_grid(&model, &intensity, UncertainBand::default(), rng)
}

/// Open water with a layered vortex current and no obstacles.
pub fn scenario_one<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Result<MotionScenario<T>> {
    let grid = TraversabilityGrid::open_water(MOTION_MAP_CELLS, MOTION_MAP_CELLS, T::of(MOTION_MAP_CELL_SIZE))?;
    let current = CurrentField::generate(&CurrentConfig::default(), grid.extent(), rng)?;
    let (start, goal) = motion_endpoints();
    Ok(MotionScenario {
        env: Environment::new(Arc::new(grid), current),
        start,
        goal,
        expected_time: T::of(1800.0),
    })
}

/// Clustered map, 5 to 8 vortices and 5 to 8 obstacles split between static
/// and buoyant ones, all spawned between the endpoints.
pub fn scenario_two<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Result<MotionScenario<T>> {
    let grid = classified_grid(&scenario_two_map(), rng)?;
    let current = CurrentField::generate(&CurrentConfig::default(), grid.extent(), rng)?;
    let (start, goal) = motion_endpoints();
    let total = rng.gen_range(5..=8usize);
    let spec = ObstacleSpec { static_count: total / 2, buoyant_count: total - total / 2, ..ObstacleSpec::default() };
    let env = Environment::new(Arc::new(grid), current).spawn(&spec, start, goal, rng)?;
    Ok(MotionScenario { env, start, goal, expected_time: T::of(1800.0) })
}

/// Number of fixed small routing instances.
pub const SMALL_INSTANCES: usize = 20;

/// Small routing instance `k`: six waypoints in a 2 km square, a random
/// connected edge set with tasks on about half the edges, and a budget between
/// 1.2 and 2 times the fewest-hop route time. Start is 0, destination 5.
pub fn six_node_instance<T: Real>(k: u64) -> (TaskGraph<T>, MissionBudget<T>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + k);
    loop {
        let waypoints: Vec<Vec3<T>> = (0..6)
            .map(|_| {
                Vec3::new(
                    uniform(&mut rng, T::zero(), T::of(2000.0)),
                    uniform(&mut rng, T::zero(), T::of(2000.0)),
                    uniform(&mut rng, T::zero(), T::of(100.0)),
                )
            })
            .collect();
        let mut links = Vec::new();
        let mut tasks = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                if (i, j) == (0, 5) || !rng.gen_bool(0.6) {
                    continue;
                }
                let task = if rng.gen_bool(0.5) {
                    tasks.push(Task {
                        id: tasks.len(),
                        priority: uniform(&mut rng, T::one(), T::of(10.0)),
                        risk: uniform(&mut rng, T::one(), T::of(100.0)),
                        duration: uniform(&mut rng, T::of(20.0), T::of(200.0)),
                    });
                    Some(tasks.len() - 1)
                } else {
                    None
                };
                links.push((i, j, task));
            }
        }
        let Ok(g) = TaskGraph::from_parts(waypoints, &links, tasks, 0, 5, T::of(2.5)) else {
            continue;
        };
        let hops = g.hop_path(0, 5).expect("connected");
        let base = crate::graph::Route::from_nodes(&g, hops).expect("adjacent hops").time;
        let budget = base * uniform(&mut rng, T::of(1.2), T::two());
        return (g, MissionBudget::new(budget));
    }
}

/// Scripted leg-time changes for the executive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LegScript<T> {
    /// Extra seconds added to the leg `(from, to)` once it has been traversed.
    pub traversal_delays: Vec<((usize, usize), T)>,
    /// Extra seconds known before departing on the leg `(from, to)`.
    pub forecast_delays: Vec<((usize, usize), T)>,
}

impl<T: Real> LegScript<T> {
    fn lookup(list: &[((usize, usize), T)], from: usize, to: usize) -> T {
        list.iter()
            .filter(|((a, b), _)| (*a, *b) == (from, to))
            .fold(T::zero(), |acc, (_, d)| acc + *d)
    }

    pub fn traversal_delay(&self, from: usize, to: usize) -> T {
        Self::lookup(&self.traversal_delays, from, to)
    }

    pub fn forecast_delay(&self, from: usize, to: usize) -> T {
        Self::lookup(&self.forecast_delays, from, to)
    }
}

/// Waypoint labels of the scripted fixture are 1-based; ids are `label - 1`.
pub fn label(id: usize) -> usize {
    id + 1
}

pub fn id(label: usize) -> usize {
    label - 1
}

/// Scripted single-mission fixture: a 20-waypoint graph in calm open water
/// whose three successive optimal plans, under a 7.5 s charge per mission
/// plan and the scripted delays, are
/// `1-9-12-4-6-16-11-7-14-18-20` (13983 s of 14400 s),
/// `12-4-6-16-11-7-14-18-20` (11002 s of 11347 s) and
/// `6-17-10-19-20` (658 s of 856 s).
pub struct ScriptedMission<T> {
    pub graph: TaskGraph<T>,
    pub env: Environment<T>,
    pub budget: T,
    pub script: LegScript<T>,
    /// Seconds charged per mission-planner call.
    pub mission_charge: T,
}

pub fn scripted_mission<T: Real>() -> Result<ScriptedMission<T>> {
    // (label, x, y); every waypoint sits at 50 m depth
    let nodes: [(usize, f64, f64); 20] = [
        (1, 1000.0, 1000.0),
        (2, 5000.0, 1000.0),
        (3, 1000.0, 16000.0),
        (4, 5000.0, 16000.0),
        (5, 5000.0, 18000.0),
        (6, 18000.0, 16000.0),
        (7, 18150.0, 16300.0),
        (8, 18400.0, 15500.0),
        (9, 1000.0, 3500.0),
        (10, 18700.0, 16000.0),
        (11, 18150.0, 16150.0),
        (12, 5000.0, 3500.0),
        (13, 17800.0, 16150.0),
        (14, 18300.0, 16300.0),
        (15, 19200.0, 16000.0),
        (16, 18000.0, 16150.0),
        (17, 18400.0, 16000.0),
        (18, 18300.0, 16450.0),
        (19, 18700.0, 16450.0),
        (20, 18450.0, 16450.0),
    ];
    let mut waypoints = vec![Vec3::zero(); 20];
    for &(l, x, y) in &nodes {
        waypoints[id(l)] = Vec3::new(T::of(x), T::of(y), T::of(50.0));
    }
    // (from, to, Some((priority, risk, duration)))
    type Link = (usize, usize, Option<(f64, f64, f64)>);
    let links: [Link; 22] = [
        (1, 9, Some((5.0, 5.0, 190.0))),
        (9, 12, Some((5.0, 5.0, 191.0))),
        (12, 4, Some((4.0, 4.0, 100.0))),
        (4, 6, Some((4.0, 4.0, 183.5))),
        (6, 16, Some((6.0, 2.0, 26.5))),
        (16, 11, Some((6.0, 2.0, 26.5))),
        (11, 7, Some((6.0, 2.0, 26.5))),
        (7, 14, Some((6.0, 2.0, 26.5))),
        (14, 18, Some((6.0, 2.0, 26.5))),
        (18, 20, Some((6.0, 2.0, 26.0))),
        (6, 17, Some((3.0, 3.0, 24.5))),
        (17, 10, Some((3.0, 3.0, 24.5))),
        (10, 19, Some((3.0, 3.0, 24.5))),
        (19, 20, Some((3.0, 3.0, 24.5))),
        (1, 2, None),
        (2, 12, None),
        (9, 3, None),
        (3, 4, None),
        (4, 5, None),
        (17, 8, None),
        (11, 13, None),
        (10, 15, None),
    ];
    let mut tasks = Vec::new();
    let mut parts = Vec::new();
    for &(a, b, task) in &links {
        let t = task.map(|(priority, risk, duration)| {
            tasks.push(Task { id: tasks.len(), priority: T::of(priority), risk: T::of(risk), duration: T::of(duration) });
            tasks.len() - 1
        });
        parts.push((id(a), id(b), t));
    }
    let graph = TaskGraph::from_parts(waypoints, &parts, tasks, id(1), id(20), T::of(2.5))?;
    let grid = TraversabilityGrid::open_water(300, 300, T::of(100.0))?;
    let env = Environment::calm(Arc::new(grid), T::of(100.0));
    Ok(ScriptedMission {
        graph,
        env,
        budget: T::of(14400.0),
        script: LegScript {
            traversal_delays: vec![((id(9), id(12)), T::of(64.5))],
            forecast_delays: vec![((id(6), id(16)), T::of(400.0))],
        },
        mission_charge: T::of(7.5),
    })
}

/// Random operating field for mission and ARMPA experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig<T> {
    /// Side of the square map in cells.
    pub cells: usize,
    pub cell_size: T,
    pub islands: usize,
    /// Island radius range, meters.
    pub island_radius: (T, T),
    pub map_noise: T,
    /// Inclusive waypoint-count range.
    pub nodes: (usize, usize),
    pub tasks: usize,
    pub network: NetworkConfig<T>,
    pub current: CurrentConfig<T>,
}

impl<T: Real> Default for WorldConfig<T> {
    fn default() -> Self {
        Self {
            cells: 1000,
            cell_size: T::of(10.0),
            islands: 6,
            island_radius: (T::of(200.0), T::of(700.0)),
            map_noise: T::of(0.05),
            nodes: (30, 50),
            tasks: 30,
            network: NetworkConfig::default(),
            current: CurrentConfig::default(),
        }
    }
}

impl<T: Real> WorldConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.cells > 0
            && self.cell_size > T::zero()
            && self.island_radius.0 <= self.island_radius.1
            && self.island_radius.0 > T::zero()
            && self.nodes.0 >= 2
            && self.nodes.0 <= self.nodes.1
            && self.current.vortices_min <= self.current.vortices_max;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("inconsistent world parameters".into()))
        }
    }

    pub fn synthetic_map<R: Rng + ?Sized>(&self, rng: &mut R) -> SyntheticMap<T> {
        SyntheticMap::random(self.cells, self.cells, self.cell_size, self.islands, self.island_radius, self.map_noise, rng)
    }
}

#[derive(Debug, Clone)]
pub struct World<T> {
    pub env: Environment<T>,
    pub graph: TaskGraph<T>,
}

/// Classified map, current field and a task graph with a uniformly drawn
/// waypoint count. `nodes` overrides the drawn count.
pub fn random_world<T: Real, R: Rng + ?Sized>(cfg: &WorldConfig<T>, nodes: Option<usize>, rng: &mut R) -> Result<World<T>> {
    cfg.validate()?;
    let grid = Arc::new(classified_grid(&cfg.synthetic_map(rng), rng)?);
    let n = nodes.unwrap_or_else(|| rng.gen_range(cfg.nodes.0..=cfg.nodes.1));
    let tasks = generate_tasks(cfg.tasks, rng);
    let graph = build_network(&grid, n, tasks, &cfg.network, rng)?;
    let current = CurrentField::generate(&cfg.current, grid.extent(), rng)?;
    Ok(World { env: Environment::new(grid, current), graph })
}
