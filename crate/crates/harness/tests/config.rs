use armpa_core::opt::EngineKind;
use armpa_core::synchron::ExecutionMode;
use armpa_harness::config::{ArmpaScenario, ChargeKind, MotionScenarioKind, RunConfig, PRESETS};
use proptest::prelude::*;

fn engine() -> impl Strategy<Value = EngineKind> {
    prop::sample::select(EngineKind::ALL.to_vec())
}

prop_compose! {
    fn run_config()(
        seed in 0..=i64::MAX as u64,
        engine in engine(),
        runs in 1usize..500,
        cells in 50usize..2000,
        island_lo in 10.0..200.0f64,
        island_span in 0.0..500.0f64,
        nodes_lo in 2usize..60,
        nodes_span in 0usize..40,
        budget in 1.0..1e6f64,
        gap in prop::option::of(1e-7..1.0f64),
        stall in prop::option::of(1usize..50),
        motion_stall in prop::option::of(1usize..50),
        scenario in any::<bool>(),
        armpa_scripted in any::<bool>(),
        charge in prop::sample::select(vec![ChargeKind::WallClock, ChargeKind::Fixed, ChargeKind::Disabled]),
        threaded in any::<bool>(),
        quantum in 0.1..600.0f64,
        sizes in prop::collection::vec(2usize..300, 1..6),
        full in any::<bool>(),
        c1 in prop::option::of(0.0..3.0f64),
        crossover in prop::option::of(0.0..=1.0f64),
        elites in prop::option::of(0usize..5),
    ) -> RunConfig {
        let mut c = RunConfig::default();
        c.run.seed = seed;
        c.run.engine = engine;
        c.run.runs = runs;
        c.environment.cells = cells;
        c.environment.island_radius_min = island_lo;
        c.environment.island_radius_max = island_lo + island_span;
        c.graph.nodes_min = nodes_lo;
        c.graph.nodes_max = nodes_lo + nodes_span;
        c.mission.budget = budget;
        c.mission.time_gap_weight = gap;
        c.mission.stall_iterations = stall;
        c.motion.stall_iterations = motion_stall;
        c.motion.scenario = if scenario { MotionScenarioKind::One } else { MotionScenarioKind::Two };
        c.armpa.scenario = if armpa_scripted { ArmpaScenario::Scripted } else { ArmpaScenario::Random };
        c.armpa.charge = charge;
        c.armpa.mode = if threaded { ExecutionMode::Threaded } else { ExecutionMode::Deterministic };
        c.armpa.quantum = quantum;
        c.scaling.nodes = sizes;
        c.scaling.full_iterations = full;
        c.pso.c1 = c1;
        c.de.crossover = crossover;
        c.bbo.elites = elites;
        c
    }
}

proptest! {
    #[test]
    fn parse_of_emit_is_identity(cfg in run_config()) {
        let text = cfg.emit();
        prop_assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }
}

#[test]
fn presets_round_trip() {
    for (name, _) in PRESETS {
        let cfg = RunConfig::preset(name).unwrap();
        assert_eq!(RunConfig::parse(&cfg.emit()).unwrap(), cfg, "{name}");
    }
}

#[test]
fn emitted_config_is_flat_sections() {
    let text = RunConfig::default().emit();
    // every table header is a single bare key
    for line in text.lines().filter(|l| l.starts_with('[')) {
        assert!(!line.contains('.'), "{line}");
    }
    assert!(text.contains("[mission]\nbudget = 34200.0"));
}

#[test]
fn zero_stall_disables_the_stop_rule() {
    let cfg = RunConfig::parse("[mission]\nstall_iterations = 0\n").unwrap();
    assert_eq!(cfg.mission.stall_iterations, None);
    assert_eq!(cfg.motion.stall_iterations, RunConfig::default().motion.stall_iterations);
}
