//! Run configuration: flat `key = value` sections in TOML syntax.
//!
//! Every section has defaults, so a config file only lists what it changes.
//! Unknown keys are rejected to catch typos in fixtures.

use std::path::{Path, PathBuf};

use armpa_core::env::{CurrentConfig, ObstacleSpec};
use armpa_core::graph::NetworkConfig;
use armpa_core::mission::{CostWeights, MissionBudget};
use armpa_core::motion::{MotionConfig, VehicleLimits};
use armpa_core::opt::{EngineConfig, EngineKind};
use armpa_core::scenarios::WorldConfig;
use armpa_core::synchron::{ChargePolicy, ExecutionMode, SynchronConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub environment: EnvironmentSection,
    pub graph: GraphSection,
    pub mission: MissionSection,
    pub motion: MotionSection,
    pub armpa: ArmpaSection,
    pub scaling: ScalingSection,
    pub de: DeSection,
    pub pso: PsoSection,
    pub bbo: BboSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Master seed; at most `i64::MAX` so it survives the TOML integer type.
    pub seed: u64,
    pub engine: EngineKind,
    pub out: PathBuf,
    /// Monte Carlo runs for the mission and motion modes.
    pub runs: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { seed: 1, engine: EngineKind::De, out: PathBuf::from("out"), runs: 150 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentSection {
    /// Side of the square map in cells.
    pub cells: usize,
    pub cell_size: f64,
    pub islands: usize,
    pub island_radius_min: f64,
    pub island_radius_max: f64,
    pub map_noise: f64,
    pub vortices_min: usize,
    pub vortices_max: usize,
    pub depth: f64,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        let w = WorldConfig::<f64>::default();
        Self {
            cells: w.cells,
            cell_size: w.cell_size,
            islands: w.islands,
            island_radius_min: w.island_radius.0,
            island_radius_max: w.island_radius.1,
            map_noise: w.map_noise,
            vortices_min: w.current.vortices_min,
            vortices_max: w.current.vortices_max,
            depth: w.current.depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    /// Inclusive waypoint-count range drawn per world.
    pub nodes_min: usize,
    pub nodes_max: usize,
    pub tasks: usize,
    pub neighbors: usize,
    pub edge_density: f64,
    pub speed: f64,
}

impl Default for GraphSection {
    fn default() -> Self {
        let n = NetworkConfig::<f64>::default();
        Self { nodes_min: 30, nodes_max: 50, tasks: 30, neighbors: n.neighbors, edge_density: n.edge_density, speed: n.speed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionSection {
    /// Time available for the mission, seconds.
    pub budget: f64,
    pub population: usize,
    pub iterations: usize,
    /// `0` in a file disables the stall stop.
    #[serde(with = "stall_rule")]
    pub stall_iterations: Option<usize>,
    /// Defaults to the reciprocal of the budget when absent.
    pub time_gap_weight: Option<f64>,
    pub weight: f64,
    pub priority: f64,
    pub risk: f64,
    pub violation: f64,
}

impl Default for MissionSection {
    fn default() -> Self {
        let e = EngineConfig::<f64>::mission_default();
        let w = CostWeights::<f64>::default();
        Self {
            budget: 3.42e4,
            population: e.population,
            iterations: e.iterations,
            stall_iterations: e.stall_iterations,
            time_gap_weight: w.time_gap,
            weight: w.weight,
            priority: w.priority,
            risk: w.risk,
            violation: w.violation,
        }
    }
}

// TOML has no null, so an absent stall rule is spelled as zero.
mod stall_rule {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(v.unwrap_or(0) as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
        Ok(Some(usize::deserialize(d)?).filter(|&n| n > 0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionScenarioKind {
    /// Open water with a vortex current.
    One,
    /// Clustered map, vortices and mixed obstacles.
    Two,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionSection {
    pub scenario: MotionScenarioKind,
    pub population: usize,
    pub iterations: usize,
    #[serde(with = "stall_rule")]
    pub stall_iterations: Option<usize>,
    pub control_points: usize,
    pub samples: usize,
}

impl Default for MotionSection {
    fn default() -> Self {
        let m = MotionConfig::<f64>::default();
        Self {
            scenario: MotionScenarioKind::Two,
            population: m.engine.population,
            iterations: m.engine.iterations,
            stall_iterations: m.engine.stall_iterations,
            control_points: m.control_points,
            samples: m.samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmpaScenario {
    /// Random world per run.
    Random,
    /// The fixed 20-waypoint mission with scripted leg delays.
    Scripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargeKind {
    WallClock,
    Fixed,
    Disabled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArmpaSection {
    pub scenario: ArmpaScenario,
    /// Total mission time, seconds.
    pub budget: f64,
    pub runs: usize,
    pub charge: ChargeKind,
    /// Seconds charged per call under the fixed policy.
    pub charge_mission: f64,
    pub charge_motion: f64,
    pub mode: ExecutionMode,
    pub quantum: f64,
    pub prefetch: bool,
    pub replan_every_step: bool,
    /// Spawn obstacles on every leg.
    pub obstacles: bool,
    /// Motion search size inside the executive, kept small for batch runs.
    pub motion_population: usize,
    pub motion_iterations: usize,
}

impl Default for ArmpaSection {
    fn default() -> Self {
        Self {
            scenario: ArmpaScenario::Random,
            budget: 14_400.0,
            runs: 30,
            charge: ChargeKind::Fixed,
            charge_mission: 5.0,
            charge_motion: 1.0,
            mode: ExecutionMode::Threaded,
            quantum: 60.0,
            prefetch: true,
            replan_every_step: false,
            obstacles: true,
            motion_population: 30,
            motion_iterations: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSection {
    pub nodes: Vec<usize>,
    /// Runs per node count.
    pub runs: usize,
    /// Disable the stall stop so every run spends the full iteration
    /// budget and timings compare equal work.
    pub full_iterations: bool,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self { nodes: vec![30, 60, 90, 120, 150], runs: 5, full_iterations: true }
    }
}

/// Engine parameter overrides applied to both planning layers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeSection {
    pub scale_min: Option<f64>,
    pub scale_max: Option<f64>,
    pub crossover: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoSection {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub inertia_start: Option<f64>,
    pub inertia_end: Option<f64>,
    pub velocity_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BboSection {
    pub immigration: Option<f64>,
    pub emigration: Option<f64>,
    pub mutation_max: Option<f64>,
    pub elites: Option<usize>,
}

/// Shipped experiment presets by name.
pub const PRESETS: [(&str, &str); 4] = [
    ("ch5_mission", include_str!("../fixtures/ch5_mission.cfg")),
    ("ch6_scenario1", include_str!("../fixtures/ch6_scenario1.cfg")),
    ("ch6_scenario2", include_str!("../fixtures/ch6_scenario2.cfg")),
    ("ch7_armpa", include_str!("../fixtures/ch7_armpa.cfg")),
];

fn set<T: Copy>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("every field has a TOML representation")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (_, text) = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
        Self::parse(text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.run.seed > i64::MAX as u64 {
            return bad("seed must not exceed 9223372036854775807");
        }
        if self.run.runs == 0 || self.armpa.runs == 0 || self.scaling.runs == 0 {
            return bad("run counts must be positive");
        }
        if self.scaling.nodes.iter().any(|&n| n < 2) || self.scaling.nodes.is_empty() {
            return bad("scaling node counts must be at least 2");
        }
        self.world().validate()?;
        self.mission_budget().validate()?;
        self.mission_engine().validate()?;
        self.motion_config().engine.validate()?;
        if self.motion.control_points < 3 || self.motion.samples < 2 {
            return bad("motion needs at least 3 control points and 2 samples");
        }
        self.synchron_config().validate()?;
        Ok(())
    }

    pub fn world(&self) -> WorldConfig<f64> {
        let e = &self.environment;
        let g = &self.graph;
        WorldConfig {
            cells: e.cells,
            cell_size: e.cell_size,
            islands: e.islands,
            island_radius: (e.island_radius_min, e.island_radius_max),
            map_noise: e.map_noise,
            nodes: (g.nodes_min, g.nodes_max),
            tasks: g.tasks,
            network: NetworkConfig {
                neighbors: g.neighbors,
                edge_density: g.edge_density,
                speed: g.speed,
                depth_range: (0.0, e.depth),
                ..NetworkConfig::default()
            },
            current: CurrentConfig {
                vortices_min: e.vortices_min,
                vortices_max: e.vortices_max,
                depth: e.depth,
                ..CurrentConfig::default()
            },
        }
    }

    pub fn mission_budget(&self) -> MissionBudget<f64> {
        MissionBudget { available: self.mission.budget, weights: self.mission_weights() }
    }

    fn mission_weights(&self) -> CostWeights<f64> {
        let m = &self.mission;
        CostWeights { time_gap: m.time_gap_weight, weight: m.weight, priority: m.priority, risk: m.risk, violation: m.violation }
    }

    fn apply_engine_overrides(&self, cfg: &mut EngineConfig<f64>) {
        cfg.engine = self.run.engine;
        set(&mut cfg.de.scale.0, self.de.scale_min);
        set(&mut cfg.de.scale.1, self.de.scale_max);
        set(&mut cfg.de.crossover, self.de.crossover);
        set(&mut cfg.pso.c1, self.pso.c1);
        set(&mut cfg.pso.c2, self.pso.c2);
        set(&mut cfg.pso.inertia.0, self.pso.inertia_start);
        set(&mut cfg.pso.inertia.1, self.pso.inertia_end);
        set(&mut cfg.pso.velocity_fraction, self.pso.velocity_fraction);
        set(&mut cfg.bbo.immigration, self.bbo.immigration);
        set(&mut cfg.bbo.emigration, self.bbo.emigration);
        set(&mut cfg.bbo.mutation_max, self.bbo.mutation_max);
        set(&mut cfg.bbo.elites, self.bbo.elites);
    }

    pub fn mission_engine(&self) -> EngineConfig<f64> {
        let mut cfg = EngineConfig::mission_default();
        cfg.population = self.mission.population;
        cfg.iterations = self.mission.iterations;
        cfg.stall_iterations = self.mission.stall_iterations;
        self.apply_engine_overrides(&mut cfg);
        cfg
    }

    /// Configuration the scaling runs plan with.
    pub fn scaling_config(&self) -> RunConfig {
        let mut cfg = self.clone();
        if self.scaling.full_iterations {
            cfg.mission.stall_iterations = None;
        }
        cfg
    }

    pub fn motion_config(&self) -> MotionConfig<f64> {
        let mut cfg = MotionConfig::default();
        cfg.engine.population = self.motion.population;
        cfg.engine.iterations = self.motion.iterations;
        cfg.engine.stall_iterations = self.motion.stall_iterations;
        cfg.control_points = self.motion.control_points;
        cfg.samples = self.motion.samples;
        self.apply_engine_overrides(&mut cfg.engine);
        cfg
    }

    pub fn limits(&self) -> VehicleLimits<f64> {
        VehicleLimits { speed: self.graph.speed, ..VehicleLimits::default() }
    }

    pub fn synchron_config(&self) -> SynchronConfig<f64> {
        let a = &self.armpa;
        let mut motion = self.motion_config();
        motion.engine.population = a.motion_population;
        motion.engine.iterations = a.motion_iterations;
        let charge = match a.charge {
            ChargeKind::WallClock => ChargePolicy::WallClock,
            ChargeKind::Fixed => ChargePolicy::Fixed { mission: a.charge_mission, motion: a.charge_motion },
            ChargeKind::Disabled => ChargePolicy::Disabled,
        };
        SynchronConfig {
            budget: a.budget,
            mission_weights: self.mission_weights(),
            mission_engine: self.mission_engine(),
            motion,
            limits: self.limits(),
            obstacles: if a.obstacles { ObstacleSpec::default() } else { ObstacleSpec::none() },
            charge,
            mode: a.mode,
            quantum: a.quantum,
            replan_every_step: a.replan_every_step,
            prefetch: a.prefetch,
            ..SynchronConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for (name, _) in PRESETS {
            RunConfig::preset(name).unwrap();
        }
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = RunConfig::parse("[mission]\nbudget = 500.0\n").unwrap();
        assert_eq!(cfg.mission.budget, 500.0);
        assert_eq!(cfg.graph, GraphSection::default());
    }

    #[test]
    fn unknown_key_is_a_config_error() {
        assert!(matches!(RunConfig::parse("[mission]\nbudgte = 1.0\n"), Err(Error::Config(_))));
    }

    #[test]
    fn overrides_reach_both_layers() {
        let cfg = RunConfig::parse("[run]\nengine = \"pso\"\n[pso]\nc1 = 0.25\n").unwrap();
        assert_eq!(cfg.mission_engine().pso.c1, 0.25);
        assert_eq!(cfg.motion_config().engine.pso.c1, 0.25);
        assert_eq!(cfg.synchron_config().mission_engine.engine, EngineKind::Pso);
    }

    #[test]
    fn negative_budget_is_rejected() {
        assert!(RunConfig::parse("[mission]\nbudget = -3.0\n").is_err());
    }
}
