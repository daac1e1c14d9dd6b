//! Single experiment runs and their per-run records.
//!
//! Every run owns a `ChaCha8Rng` seeded from its own seed, so a run's output
//! does not depend on what else runs beside it.

use std::time::Instant;

use armpa_core::graph::TaskGraph;
use armpa_core::mission::{plan_mission, MissionPlan};
use armpa_core::motion::{plan_path, PathSolution};
use armpa_core::opt::OptTrace;
use armpa_core::scenarios::{random_world, scenario_one, scenario_two, scripted_mission, LegScript, MotionScenario, World};
use armpa_core::synchron::{run_mission, MissionReport, Outcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ArmpaScenario, MotionScenarioKind, RunConfig};
use crate::error::Result;
use crate::stats::Record;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn build_world(cfg: &RunConfig, nodes: Option<usize>, rng: &mut ChaCha8Rng) -> Result<World<f64>> {
    Ok(random_world(&cfg.world(), nodes, rng)?)
}

pub fn plan_on(cfg: &RunConfig, graph: &TaskGraph<f64>, rng: &mut ChaCha8Rng) -> Result<(MissionPlan<f64>, OptTrace<f64>)> {
    Ok(plan_mission(graph, &cfg.mission_budget(), &cfg.mission_engine(), rng)?)
}

pub fn motion_scenario(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<MotionScenario<f64>> {
    Ok(match cfg.motion.scenario {
        MotionScenarioKind::One => scenario_one(rng)?,
        MotionScenarioKind::Two => scenario_two(rng)?,
    })
}

pub struct MotionOutput {
    pub scenario: MotionScenario<f64>,
    pub solution: PathSolution<f64>,
    pub trace: OptTrace<f64>,
}

pub fn motion_run(cfg: &RunConfig, seed: u64) -> Result<MotionOutput> {
    let mut rng = rng(seed);
    let scenario = motion_scenario(cfg, &mut rng)?;
    let (solution, trace) =
        plan_path(&scenario.env, scenario.start, scenario.goal, &cfg.limits(), &cfg.motion_config(), &mut rng, None)?;
    Ok(MotionOutput { scenario, solution, trace })
}

/// Runs the executive on a random world or on the scripted fixture. The
/// scripted fixture keeps its own budget and planner charge.
pub fn armpa_run(cfg: &RunConfig, seed: u64) -> Result<(TaskGraph<f64>, MissionReport<f64>)> {
    let mut rng = rng(seed);
    let mut sync = cfg.synchron_config();
    match cfg.armpa.scenario {
        ArmpaScenario::Random => {
            let world = build_world(cfg, None, &mut rng)?;
            let report = run_mission(&world.graph, &world.env, &sync, &LegScript::default(), &mut rng)?;
            Ok((world.graph, report))
        }
        ArmpaScenario::Scripted => {
            let m = scripted_mission::<f64>()?;
            sync.budget = m.budget;
            sync.obstacles = armpa_core::env::ObstacleSpec::none();
            sync.charge = armpa_core::synchron::ChargePolicy::Fixed { mission: m.mission_charge, motion: 0.0 };
            let report = run_mission(&m.graph, &m.env, &sync, &m.script, &mut rng)?;
            Ok((m.graph, report))
        }
    }
}

fn status_of(e: &crate::error::Error) -> String {
    let s = e.to_string();
    s.split(':').next().unwrap_or("error").trim().replace(' ', "_")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionRecord {
    pub run: usize,
    pub seed: u64,
    pub engine: String,
    /// `ok`, `late` when the plan overruns the budget, or the failure kind.
    pub status: String,
    pub nodes: usize,
    pub edges: usize,
    pub route_nodes: usize,
    pub task_count: usize,
    pub weight: f64,
    /// Planned mission time, seconds.
    pub time: f64,
    pub remaining: f64,
    pub cost: f64,
    pub violation: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub mission_ms: f64,
}

impl MissionRecord {
    pub fn new(run: usize, seed: u64, cfg: &RunConfig, g: &TaskGraph<f64>, plan: &MissionPlan<f64>, trace: &OptTrace<f64>) -> Self {
        Self {
            run,
            seed,
            engine: cfg.run.engine.to_string(),
            status: if plan.violation > 0.0 { "late" } else { "ok" }.into(),
            nodes: g.waypoint_count(),
            edges: g.edges().len(),
            route_nodes: plan.route.nodes.len(),
            task_count: plan.task_count,
            weight: plan.weight,
            time: plan.time,
            remaining: plan.budget - plan.time,
            cost: plan.cost,
            violation: plan.violation,
            iterations: trace.rows.len() - 1,
            evaluations: trace.evaluations,
            mission_ms: trace.wall_ms,
        }
    }

    fn failed(run: usize, seed: u64, cfg: &RunConfig, e: &crate::error::Error) -> Self {
        Self {
            run,
            seed,
            engine: cfg.run.engine.to_string(),
            status: status_of(e),
            nodes: 0,
            edges: 0,
            route_nodes: 0,
            task_count: 0,
            weight: f64::NAN,
            time: f64::NAN,
            remaining: f64::NAN,
            cost: f64::NAN,
            violation: f64::NAN,
            iterations: 0,
            evaluations: 0,
            mission_ms: f64::NAN,
        }
    }
}

impl Record for MissionRecord {
    fn metrics(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("nodes", self.nodes as f64),
            ("task_count", self.task_count as f64),
            ("weight", self.weight),
            ("time", self.time),
            ("remaining", self.remaining),
            ("cost", self.cost),
            ("violation", self.violation),
            ("iterations", self.iterations as f64),
            ("mission_ms", self.mission_ms),
        ]
    }

    fn violated(&self) -> bool {
        self.status != "ok"
    }
}

/// World draw plus one mission plan.
pub fn mission_record(cfg: &RunConfig, run: usize, seed: u64, nodes: Option<usize>) -> MissionRecord {
    let mut r = rng(seed);
    let result = build_world(cfg, nodes, &mut r).and_then(|w| {
        let (plan, trace) = plan_on(cfg, &w.graph, &mut r)?;
        Ok(MissionRecord::new(run, seed, cfg, &w.graph, &plan, &trace))
    });
    result.unwrap_or_else(|e| MissionRecord::failed(run, seed, cfg, &e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionRecord {
    pub run: usize,
    pub seed: u64,
    pub engine: String,
    /// `ok`, `violated` when any constraint component is non-zero, or the
    /// failure kind.
    pub status: String,
    pub vortices: usize,
    pub obstacles: usize,
    pub straight: f64,
    pub length: f64,
    /// Path time, seconds.
    pub time: f64,
    pub expected: f64,
    pub cost: f64,
    pub depth_min: f64,
    pub depth_max: f64,
    pub surge: f64,
    pub sway: f64,
    pub yaw_rate: f64,
    pub collision: f64,
    pub min_z: f64,
    pub max_z: f64,
    pub max_surge: f64,
    pub max_abs_sway: f64,
    pub max_abs_yaw_deg: f64,
    pub iterations: usize,
    pub motion_ms: f64,
}

impl MotionRecord {
    pub fn new(run: usize, seed: u64, cfg: &RunConfig, out: &MotionOutput) -> Self {
        let s = &out.solution;
        let v = s.violations;
        let fold = |f: &dyn Fn(&armpa_core::motion::PathState<f64>) -> f64, max: bool| {
            s.states.iter().map(f).fold(if max { f64::NEG_INFINITY } else { f64::INFINITY }, |a, b| if max { a.max(b) } else { a.min(b) })
        };
        Self {
            run,
            seed,
            engine: cfg.run.engine.to_string(),
            status: if v.is_clear() { "ok" } else { "violated" }.into(),
            vortices: out.scenario.env.current().vortex_count(),
            obstacles: out.scenario.env.obstacles().len(),
            straight: out.scenario.start.distance(out.scenario.goal),
            length: s.length,
            time: s.time,
            expected: out.scenario.expected_time,
            cost: s.cost,
            depth_min: v.depth_min,
            depth_max: v.depth_max,
            surge: v.surge,
            sway: v.sway,
            yaw_rate: v.yaw_rate,
            collision: v.collision,
            min_z: fold(&|p| p.position.z, false),
            max_z: fold(&|p| p.position.z, true),
            max_surge: fold(&|p| p.surge(), true),
            max_abs_sway: fold(&|p| p.sway().abs(), true),
            // the first sample has no incoming turn
            max_abs_yaw_deg: s.states.iter().skip(1).map(|p| p.yaw_rate.abs().to_degrees()).fold(0.0, f64::max),
            iterations: out.trace.rows.len() - 1,
            motion_ms: out.trace.wall_ms,
        }
    }

    fn failed(run: usize, seed: u64, cfg: &RunConfig, e: &crate::error::Error) -> Self {
        let nan = f64::NAN;
        Self {
            run,
            seed,
            engine: cfg.run.engine.to_string(),
            status: status_of(e),
            vortices: 0,
            obstacles: 0,
            straight: nan,
            length: nan,
            time: nan,
            expected: nan,
            cost: nan,
            depth_min: nan,
            depth_max: nan,
            surge: nan,
            sway: nan,
            yaw_rate: nan,
            collision: nan,
            min_z: nan,
            max_z: nan,
            max_surge: nan,
            max_abs_sway: nan,
            max_abs_yaw_deg: nan,
            iterations: 0,
            motion_ms: nan,
        }
    }
}

impl Record for MotionRecord {
    fn metrics(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("length", self.length),
            ("time", self.time),
            ("cost", self.cost),
            ("max_surge", self.max_surge),
            ("max_abs_sway", self.max_abs_sway),
            ("max_abs_yaw_deg", self.max_abs_yaw_deg),
            ("iterations", self.iterations as f64),
            ("motion_ms", self.motion_ms),
        ]
    }

    fn violated(&self) -> bool {
        self.status != "ok"
    }
}

pub fn motion_record(cfg: &RunConfig, run: usize, seed: u64) -> MotionRecord {
    match motion_run(cfg, seed) {
        Ok(out) => MotionRecord::new(run, seed, cfg, &out),
        Err(e) => MotionRecord::failed(run, seed, cfg, &e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmpaRecord {
    pub run: usize,
    pub seed: u64,
    pub engine: String,
    /// Executive outcome or the failure kind.
    pub status: String,
    pub nodes: usize,
    pub rep: usize,
    pub legs: usize,
    pub plans: usize,
    pub budget: f64,
    /// Sum of traversed leg times.
    pub mission_time: f64,
    pub remaining_time: f64,
    pub final_budget: f64,
    /// Ledger terms in microseconds.
    pub ledger_budget_us: i64,
    pub ledger_remaining_us: i64,
    pub ledger_legs_us: i64,
    pub ledger_charges_us: i64,
    pub charged_mission: f64,
    pub charged_motion: f64,
    pub mission_cost: f64,
    pub path_factor: f64,
    pub total_cost: f64,
    pub collisions: usize,
    pub motion_replans: usize,
    pub mission_ms: f64,
    pub motion_ms: f64,
}

impl ArmpaRecord {
    pub fn new(run: usize, seed: u64, cfg: &RunConfig, g: &TaskGraph<f64>, r: &MissionReport<f64>) -> Self {
        Self {
            run,
            seed,
            engine: cfg.run.engine.to_string(),
            status: format!("{:?}", r.outcome).to_lowercase(),
            nodes: g.waypoint_count(),
            rep: r.rep,
            legs: r.legs.len(),
            plans: r.plans.len(),
            budget: r.budget,
            mission_time: r.mission_time,
            remaining_time: r.remaining_time,
            final_budget: r.final_budget,
            ledger_budget_us: r.ledger.budget,
            ledger_remaining_us: r.ledger.remaining,
            ledger_legs_us: r.ledger.legs,
            ledger_charges_us: r.ledger.charges,
            charged_mission: r.charged_mission,
            charged_motion: r.charged_motion,
            mission_cost: r.mission_cost.unwrap_or(f64::NAN),
            path_factor: r.path_factor.unwrap_or(f64::NAN),
            total_cost: r.total_cost().unwrap_or(f64::NAN),
            collisions: r.collisions(),
            motion_replans: r.motion_replans(),
            mission_ms: r.mission_wall_ms,
            motion_ms: r.motion_wall_ms,
        }
    }

    fn failed(run: usize, seed: u64, cfg: &RunConfig, e: &crate::error::Error) -> Self {
        let nan = f64::NAN;
        Self {
            run,
            seed,
            engine: cfg.run.engine.to_string(),
            status: status_of(e),
            nodes: 0,
            rep: 0,
            legs: 0,
            plans: 0,
            budget: cfg.armpa.budget,
            mission_time: nan,
            remaining_time: nan,
            final_budget: nan,
            ledger_budget_us: 0,
            ledger_remaining_us: 0,
            ledger_legs_us: 0,
            ledger_charges_us: 0,
            charged_mission: nan,
            charged_motion: nan,
            mission_cost: nan,
            path_factor: nan,
            total_cost: nan,
            collisions: 0,
            motion_replans: 0,
            mission_ms: nan,
            motion_ms: nan,
        }
    }

    pub fn balanced(&self) -> bool {
        self.ledger_budget_us == self.ledger_remaining_us + self.ledger_legs_us + self.ledger_charges_us
    }
}

impl Record for ArmpaRecord {
    fn metrics(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("rep", self.rep as f64),
            ("legs", self.legs as f64),
            ("mission_time", self.mission_time),
            ("remaining_time", self.remaining_time),
            ("final_budget", self.final_budget),
            ("charged_motion", self.charged_motion),
            ("mission_cost", self.mission_cost),
            ("total_cost", self.total_cost),
            ("collisions", self.collisions as f64),
            ("mission_ms", self.mission_ms),
            ("motion_ms", self.motion_ms),
        ]
    }

    fn violated(&self) -> bool {
        self.status != format!("{:?}", Outcome::Success).to_lowercase() || !self.balanced() || self.mission_time > self.budget
    }
}

pub fn armpa_record(cfg: &RunConfig, run: usize, seed: u64) -> ArmpaRecord {
    match armpa_run(cfg, seed) {
        Ok((g, r)) => ArmpaRecord::new(run, seed, cfg, &g, &r),
        Err(e) => ArmpaRecord::failed(run, seed, cfg, &e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub run: usize,
    pub seed: u64,
    pub engine: String,
    pub status: String,
    pub nodes: usize,
    pub edges: usize,
    pub iterations: usize,
    pub evaluations: usize,
    pub cost: f64,
    pub violation: f64,
    pub mission_ms: f64,
}

impl Record for ScalingRecord {
    fn metrics(&self) -> Vec<(&'static str, f64)> {
        vec![("nodes", self.nodes as f64), ("iterations", self.iterations as f64), ("mission_ms", self.mission_ms)]
    }

    fn violated(&self) -> bool {
        self.status != "ok"
    }
}

/// Builds the world first so that only the planner call is timed.
pub fn scaling_world(cfg: &RunConfig, nodes: usize, seed: u64) -> Result<(World<f64>, ChaCha8Rng)> {
    let mut r = rng(seed);
    let w = build_world(cfg, Some(nodes), &mut r)?;
    Ok((w, r))
}

pub fn scaling_record(cfg: &RunConfig, run: usize, seed: u64, nodes: usize, world: Result<(World<f64>, ChaCha8Rng)>) -> ScalingRecord {
    let clock = Instant::now();
    let result = world.and_then(|(w, mut r)| {
        let (plan, trace) = plan_on(cfg, &w.graph, &mut r)?;
        Ok((w, plan, trace))
    });
    let elapsed = clock.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok((w, plan, trace)) => ScalingRecord {
            run,
            seed,
            engine: cfg.run.engine.to_string(),
            status: if plan.violation > 0.0 { "late" } else { "ok" }.into(),
            nodes: w.graph.waypoint_count(),
            edges: w.graph.edges().len(),
            iterations: trace.rows.len() - 1,
            evaluations: trace.evaluations,
            cost: plan.cost,
            violation: plan.violation,
            mission_ms: elapsed,
        },
        Err(e) => ScalingRecord {
            run,
            seed,
            engine: cfg.run.engine.to_string(),
            status: status_of(&e),
            nodes,
            edges: 0,
            iterations: 0,
            evaluations: 0,
            cost: f64::NAN,
            violation: f64::NAN,
            mission_ms: f64::NAN,
        },
    }
}
