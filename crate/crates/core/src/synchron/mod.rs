//! Executive that runs the mission and motion layers side by side, compares
//! each traversed leg against its expected time and re-plans the mission when
//! time is lost.
//!
//! All budget bookkeeping is done in whole microseconds so that
//! `budget = remaining + legs + charges` holds exactly.

mod layers;

use std::io::Write;
use std::sync::Arc;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use layers::ExecutionMode;
use layers::{mission_worker, motion_worker, MissionDone, MissionJob, MotionDone, MotionJob, MotionRequest, Worker};

use crate::env::{Environment, ObstacleSpec};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::graph::{Route, TaskGraph};
use crate::mission::{route_cost, CostWeights, MissionBudget, MissionPlan};
use crate::motion::{state_collides, MotionConfig, PathSolution, PathState, VehicleLimits};
use crate::opt::EngineConfig;
use crate::scalar::Real;
use crate::scenarios::LegScript;

pub type Micros = i64;

pub fn to_micros<T: Real>(seconds: T) -> Micros {
    (seconds.as_f64() * 1e6).round() as Micros
}

pub fn from_micros<T: Real>(us: Micros) -> T {
    T::of(us as f64 / 1e6)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Continue,
    ReplanMission,
}

/// Continue iff the path time does not exceed the expected time, compared at
/// microsecond resolution.
pub fn check_replan<T: Real>(path_time: T, expected: T) -> Decision {
    if to_micros(path_time) > to_micros(expected) {
        Decision::ReplanMission
    } else {
        Decision::Continue
    }
}

/// Unused budget at mission end.
pub fn remaining_time<T: Real>(available: T, mission_time: T) -> T {
    available - mission_time
}

/// Clock used to charge planner calls against the remaining budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChargePolicy<T> {
    /// Measured wall time of each planner call.
    WallClock,
    /// Fixed seconds per call; a stub clock for reproducible runs.
    Fixed { mission: T, motion: T },
    Disabled,
}

impl<T: Real> ChargePolicy<T> {
    fn mission(&self, measured: Duration) -> Micros {
        match self {
            ChargePolicy::WallClock => measured.as_micros() as Micros,
            ChargePolicy::Fixed { mission, .. } => to_micros(*mission),
            ChargePolicy::Disabled => 0,
        }
    }

    fn motion(&self, measured: Duration) -> Micros {
        match self {
            ChargePolicy::WallClock => measured.as_micros() as Micros,
            ChargePolicy::Fixed { motion, .. } => to_micros(*motion),
            ChargePolicy::Disabled => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynchronConfig<T> {
    /// Total time available for the mission, seconds.
    pub budget: T,
    pub mission_weights: CostWeights<T>,
    pub mission_engine: EngineConfig<T>,
    pub motion: MotionConfig<T>,
    pub limits: VehicleLimits<T>,
    /// Obstacles spawned between the endpoints of every leg.
    pub obstacles: ObstacleSpec<T>,
    pub charge: ChargePolicy<T>,
    pub mode: ExecutionMode,
    /// Simulated seconds between environment updates while traversing.
    pub quantum: T,
    /// Refine the path at every environment update, not only when the
    /// remaining path has become unsafe.
    pub replan_every_step: bool,
    /// Plan the next leg while the current one is traversed.
    pub prefetch: bool,
    pub max_mission_replans: usize,
}

impl<T: Real> Default for SynchronConfig<T> {
    fn default() -> Self {
        Self {
            budget: T::of(14_400.0),
            mission_weights: CostWeights::default(),
            mission_engine: EngineConfig::mission_default(),
            motion: MotionConfig::default(),
            limits: VehicleLimits::default(),
            obstacles: ObstacleSpec::default(),
            charge: ChargePolicy::Fixed { mission: T::of(5.0), motion: T::one() },
            mode: ExecutionMode::Threaded,
            quantum: T::of(60.0),
            replan_every_step: false,
            prefetch: true,
            max_mission_replans: 64,
        }
    }
}

impl<T: Real> SynchronConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.limits.validate()?;
        self.mission_engine.validate()?;
        self.motion.engine.validate()?;
        MissionBudget { available: self.budget, weights: self.mission_weights }.validate()?;
        if !(self.quantum > T::zero()) {
            return Err(Error::Config("traversal quantum must be positive".into()));
        }
        if let ChargePolicy::Fixed { mission, motion } = self.charge {
            if mission < T::zero() || motion < T::zero() {
                return Err(Error::Config("planner charges must be non-negative".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Timeout,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trigger {
    Initial,
    /// The traversed leg took longer than expected.
    LostTime { from: usize, to: usize },
    /// The leg about to start is predicted to break the budget.
    Forecast { from: usize, to: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord<T> {
    pub trigger: Trigger,
    pub from: usize,
    /// Budget the plan was fitted to.
    pub budget: T,
    pub route: Vec<usize>,
    pub time: T,
    pub cost: T,
    pub task_count: usize,
    pub weight: T,
    /// Active waypoints and edges of the graph it was planned on.
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub charged: T,
    /// Mission clock when planning started.
    pub issued_at: T,
    pub mission_wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegRecord<T> {
    pub from: usize,
    pub to: usize,
    /// Expected leg time from the active plan.
    pub expected: T,
    /// Path time predicted at departure, with task time and forecast delay.
    pub predicted: T,
    /// Leg time as traversed, with task time and every delay.
    pub path_time: T,
    pub length: T,
    pub straight: T,
    pub path_cost: T,
    pub motion_replans: usize,
    pub collided: bool,
    pub obstacles: usize,
    pub departed_at: T,
    pub motion_wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    MissionPlan { index: usize, trigger: Trigger },
    Depart { from: usize, to: usize },
    MotionReplan { from: usize, to: usize, kept_previous: bool },
    Arrive { from: usize, to: usize },
    Finish { outcome: Outcome },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event<T> {
    /// Mission clock, seconds since the start.
    pub at: T,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Budget accounting in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub budget: Micros,
    pub remaining: Micros,
    pub legs: Micros,
    pub charges: Micros,
}

impl Ledger {
    fn new(budget: Micros) -> Self {
        Self { budget, remaining: budget, legs: 0, charges: 0 }
    }

    pub fn balanced(&self) -> bool {
        self.budget == self.remaining + self.legs + self.charges
    }

    fn leg(&mut self, us: Micros) {
        self.legs += us;
        self.remaining -= us;
    }

    fn charge(&mut self, us: Micros) {
        self.charges += us;
        self.remaining -= us;
    }

    fn elapsed(&self) -> Micros {
        self.budget - self.remaining
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionReport<T> {
    pub outcome: Outcome,
    /// Waypoints actually visited, start first.
    pub route: Vec<usize>,
    pub legs: Vec<LegRecord<T>>,
    pub plans: Vec<PlanRecord<T>>,
    pub events: Vec<Event<T>>,
    /// Mission re-plans executed.
    pub rep: usize,
    pub budget: T,
    /// Sum of traversed leg times.
    pub mission_time: T,
    /// `budget - mission_time`.
    pub remaining_time: T,
    /// Budget left after legs and planner charges.
    pub final_budget: T,
    pub ledger: Ledger,
    pub charged_mission: T,
    pub charged_motion: T,
    /// Mission cost of the visited route against the full budget on the
    /// original graph; absent when no leg was traversed.
    pub mission_cost: Option<T>,
    /// Mean per-leg path cost over straight-line distance.
    pub path_factor: Option<T>,
    pub mission_wall_ms: f64,
    pub motion_wall_ms: f64,
}

/// Scales of the planner-time terms in the total cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostComposition<T> {
    /// Per second of charged motion-planner time.
    pub motion_cpu: T,
    /// Per second of charged mission re-planning time.
    pub mission_cpu: T,
}

impl<T: Real> Default for CostComposition<T> {
    fn default() -> Self {
        Self { motion_cpu: T::one(), mission_cpu: T::one() }
    }
}

/// `C_R f(C_p) + motion_cpu * sum(motion charges) + mission_cpu * sum(re-plan
/// charges)`; the initial plan's charge is not a re-planning cost.
pub fn total_cost<T: Real>(report: &MissionReport<T>, w: &CostComposition<T>) -> Option<T> {
    let replans: T = report.plans.iter().skip(1).map(|p| p.charged).sum();
    Some(report.mission_cost? * report.path_factor? + w.motion_cpu * report.charged_motion + w.mission_cpu * replans)
}

impl<T: Real> MissionReport<T> {
    pub fn success(&self) -> bool {
        self.outcome == Outcome::Success
    }

    pub fn total_cost(&self) -> Option<T> {
        total_cost(self, &CostComposition::default())
    }

    pub fn collisions(&self) -> usize {
        self.legs.iter().filter(|l| l.collided).count()
    }

    pub fn motion_replans(&self) -> usize {
        self.legs.iter().map(|l| l.motion_replans).sum()
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub const CSV_HEADER: &'static str = "outcome,rep,legs,plans,budget,mission_time,remaining_time,final_budget,\
        charged_mission,charged_motion,mission_cost,path_factor,total_cost,collisions,motion_replans,\
        mission_wall_ms,motion_wall_ms";

    /// One summary row matching [`Self::CSV_HEADER`]; wall-clock columns last.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<T>| v.map_or(String::new(), |v| v.to_string());
        format!(
            "{:?},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{:.3}",
            self.outcome,
            self.rep,
            self.legs.len(),
            self.plans.len(),
            self.budget,
            self.mission_time,
            self.remaining_time,
            self.final_budget,
            self.charged_mission,
            self.charged_motion,
            opt(self.mission_cost),
            opt(self.path_factor),
            opt(self.total_cost()),
            self.collisions(),
            self.motion_replans(),
            self.mission_wall_ms,
            self.motion_wall_ms,
        )
        .to_lowercase()
    }
}

/// Position along sampled states at path time `t`.
fn position_at<T: Real>(states: &[PathState<T>], t: T) -> Vec3<T> {
    let k = states.partition_point(|s| s.t <= t);
    if k == 0 {
        return states[0].position;
    }
    if k == states.len() {
        return states[k - 1].position;
    }
    let (s0, s1) = (&states[k - 1], &states[k]);
    let span = s1.t - s0.t;
    if span > T::zero() {
        s0.position.lerp(s1.position, (t - s0.t) / span)
    } else {
        s1.position
    }
}

fn remaining_collides<T: Real>(states: &[PathState<T>], t: T, env: &Environment<T>) -> bool {
    states.iter().filter(|s| s.t >= t).any(|s| state_collides(s, env))
}

struct Prefetch<T> {
    from: usize,
    to: usize,
    obstacles: usize,
    done: Option<MotionDone<T>>,
}

struct Driver<'a, T: Real, R: Rng + ?Sized> {
    cfg: &'a SynchronConfig<T>,
    script: &'a LegScript<T>,
    graph: Arc<TaskGraph<T>>,
    rng: &'a mut R,
    mission: Worker<MissionJob<T>, MissionDone<T>>,
    motion: Worker<MotionJob<T>, MotionDone<T>>,
    env: Environment<T>,
    /// Obstacles present before the run; leg obstacles follow them.
    persistent: usize,
    ledger: Ledger,
    here: usize,
    passed: Vec<usize>,
    blocked: Vec<usize>,
    prefetch: Option<Prefetch<T>>,
    plans: Vec<PlanRecord<T>>,
    legs: Vec<LegRecord<T>>,
    events: Vec<Event<T>>,
    route: Vec<usize>,
    rep: usize,
    charged_mission: Micros,
    charged_motion: Micros,
    mission_wall_ms: f64,
    motion_wall_ms: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl<T: Real, R: Rng + ?Sized> Driver<'_, T, R> {
    fn now(&self) -> T {
        from_micros(self.ledger.elapsed())
    }

    fn event(&mut self, at: T, kind: EventKind) {
        self.events.push(Event { at, kind });
    }

    fn plan(&mut self, trigger: Trigger) -> std::result::Result<MissionPlan<T>, Outcome> {
        if self.ledger.remaining <= 0 {
            return Err(Outcome::Timeout);
        }
        if self.plans.len() > self.cfg.max_mission_replans {
            return Err(Outcome::Infeasible);
        }
        let budget = MissionBudget { available: from_micros(self.ledger.remaining), weights: self.cfg.mission_weights };
        let issued_at = self.now();
        let done = self.mission.call(MissionJob {
            graph: Arc::clone(&self.graph),
            passed: self.passed.clone(),
            blocked: self.blocked.clone(),
            here: self.here,
            budget,
            engine: self.cfg.mission_engine.clone(),
            seed: self.rng.gen(),
        });
        let charge = self.cfg.charge.mission(done.elapsed);
        self.ledger.charge(charge);
        self.charged_mission += charge;
        self.mission_wall_ms += ms(done.elapsed);
        let (pruned, plan) = done.result.map_err(|_| Outcome::Infeasible)?;
        let index = self.plans.len();
        self.plans.push(PlanRecord {
            trigger,
            from: self.here,
            budget: budget.available,
            route: plan.route.nodes.clone(),
            time: plan.time,
            cost: plan.cost,
            task_count: plan.task_count,
            weight: plan.weight,
            graph_nodes: pruned.active_count(),
            graph_edges: pruned.edges().len(),
            charged: from_micros(charge),
            issued_at,
            mission_wall_ms: ms(done.elapsed),
        });
        self.event(issued_at, EventKind::MissionPlan { index, trigger });
        Ok(plan)
    }

    fn motion_call(&mut self, request: MotionRequest<T>) -> MotionDone<T> {
        self.collect_prefetch();
        let job = self.motion_job(request, self.env.clone());
        let done = self.motion.call(job);
        self.account_motion(&done);
        done
    }

    fn motion_job(&mut self, request: MotionRequest<T>, env: Environment<T>) -> MotionJob<T> {
        MotionJob { request, env, limits: self.cfg.limits, cfg: self.cfg.motion.clone(), seed: self.rng.gen() }
    }

    fn account_motion(&mut self, done: &MotionDone<T>) {
        let charge = self.cfg.charge.motion(done.elapsed);
        self.ledger.charge(charge);
        self.charged_motion += charge;
        self.motion_wall_ms += ms(done.elapsed);
    }

    /// Receives an outstanding prefetch so later jobs are not answered by it.
    fn collect_prefetch(&mut self) {
        if let Some(p) = &mut self.prefetch {
            if p.done.is_none() {
                let done = self.motion.recv();
                self.account_motion(&done);
                self.prefetch.as_mut().expect("checked").done = Some(done);
            }
        }
    }

    fn spawn_leg_obstacles(&mut self, a: Vec3<T>, b: Vec3<T>) -> usize {
        let before = self.env.obstacles().len();
        // legs too short to hold the obstacles simply get none
        if let Ok(next) = self.env.spawn(&self.cfg.obstacles, a, b, self.rng) {
            self.env = next;
        }
        self.env.obstacles().len() - before
    }

    fn drop_obstacles(&mut self, start: usize, count: usize) {
        let mut obs = self.env.obstacles().to_vec();
        obs.drain(start..start + count);
        self.env = self.env.with_obstacles(obs);
    }

    /// Path for the leg `(i, j)` plus its obstacle count and planning wall time.
    fn leg_path(&mut self, i: usize, j: usize) -> std::result::Result<(PathSolution<T>, usize, f64), Outcome> {
        self.collect_prefetch();
        let (a, b) = (self.graph.position(i), self.graph.position(j));
        if let Some(p) = self.prefetch.take() {
            let done = p.done.expect("collected");
            if (p.from, p.to) == (i, j) {
                if let Ok(sol) = done.result {
                    let wall = ms(done.elapsed);
                    let stale = remaining_collides(&sol.states, T::zero(), &self.env);
                    if !stale {
                        return Ok((sol, p.obstacles, wall));
                    }
                    let again = self.motion_call(MotionRequest::Replan { prev: sol, position: a });
                    let wall = wall + ms(again.elapsed);
                    return again.result.map(|s| (s, p.obstacles, wall)).map_err(|_| Outcome::Infeasible);
                }
            }
            let n = self.env.obstacles().len();
            self.drop_obstacles(n - p.obstacles, p.obstacles);
        }
        let count = self.spawn_leg_obstacles(a, b);
        let done = self.motion_call(MotionRequest::Plan { a, b });
        let wall = ms(done.elapsed);
        done.result.map(|s| (s, count, wall)).map_err(|_| Outcome::Infeasible)
    }

    fn submit_prefetch(&mut self, from: usize, to: usize) {
        let (a, b) = (self.graph.position(from), self.graph.position(to));
        let obstacles = self.spawn_leg_obstacles(a, b);
        let job = self.motion_job(MotionRequest::Plan { a, b }, self.env.clone());
        self.motion.submit(job);
        self.prefetch = Some(Prefetch { from, to, obstacles, done: None });
    }

    /// Follows the path while the environment evolves, refining it whenever
    /// the rest of it becomes unsafe. Returns the travel time, the final path,
    /// the refinement count and whether any visited position collided.
    fn traverse(&mut self, i: usize, j: usize, mut sol: PathSolution<T>, departed: T) -> (T, PathSolution<T>, usize, bool, f64) {
        let q = self.cfg.quantum;
        let mut consumed = T::zero();
        let mut tau = T::zero();
        let mut replans = 0;
        let mut collided = false;
        let mut wall = 0.0;
        while sol.time - tau > q {
            tau = tau + q;
            self.env = self.env.evolve(self.rng);
            let pos = position_at(&sol.states, tau);
            let probe = PathState { position: pos, ..sol.states[0] };
            if state_collides(&probe, &self.env) {
                collided = true;
            }
            if self.cfg.replan_every_step || remaining_collides(&sol.states, tau, &self.env) {
                let done = self.motion_call(MotionRequest::Replan { prev: sol.clone(), position: pos });
                wall += ms(done.elapsed);
                if let Ok(next) = done.result {
                    self.event(departed + consumed + tau, EventKind::MotionReplan { from: i, to: j, kept_previous: done.kept_previous });
                    consumed = consumed + tau;
                    tau = T::zero();
                    sol = next;
                    replans += 1;
                }
            }
        }
        (consumed + sol.time, sol, replans, collided, wall)
    }

    fn rest_of_plan(&self, nodes: &[usize], k: usize) -> Micros {
        nodes[k + 1..]
            .windows(2)
            .map(|w| to_micros(self.graph.edge(self.graph.edge_between(w[0], w[1]).expect("planned edge")).time))
            .sum()
    }

    fn run(&mut self) -> Outcome {
        let mut plan = match self.plan(Trigger::Initial) {
            Ok(p) => p,
            Err(o) => return o,
        };
        let mut k = 0;
        loop {
            let nodes = plan.route.nodes.clone();
            let (i, j) = (nodes[k], nodes[k + 1]);
            let e = self.graph.edge_between(i, j).expect("planned edge");
            let edge = *self.graph.edge(e);
            let (sol, obstacles, mut wall) = match self.leg_path(i, j) {
                Ok(v) => v,
                Err(o) => return o,
            };
            let forecast = self.script.forecast_delay(i, j);
            let predicted = sol.time + edge.duration + forecast;
            let rest = self.rest_of_plan(&nodes, k);
            let remaining = self.ledger.remaining;
            if to_micros(predicted) + rest > remaining && to_micros(edge.time) + rest <= remaining {
                self.blocked.push(e);
                match self.plan(Trigger::Forecast { from: i, to: j }) {
                    Ok(p) => {
                        let start = self.env.obstacles().len() - obstacles;
                        self.drop_obstacles(start, obstacles);
                        self.rep += 1;
                        plan = p;
                        k = 0;
                        continue;
                    }
                    // no detour around the slow leg: keep the current plan
                    Err(Outcome::Infeasible) => {
                        self.blocked.pop();
                    }
                    Err(o) => return o,
                }
            }

            let departed = self.now();
            self.event(departed, EventKind::Depart { from: i, to: j });
            if self.cfg.prefetch && k + 2 < nodes.len() {
                self.submit_prefetch(j, nodes[k + 2]);
            }
            let (travel, last, replans, collided, more_wall) = self.traverse(i, j, sol, departed);
            wall += more_wall;
            let path_time = travel + edge.duration + forecast + self.script.traversal_delay(i, j);
            self.ledger.leg(to_micros(path_time));
            debug_assert!(self.ledger.balanced());
            let length = travel * self.cfg.limits.speed;
            self.legs.push(LegRecord {
                from: i,
                to: j,
                expected: edge.time,
                predicted,
                path_time,
                length,
                straight: edge.length,
                path_cost: length + last.violations.weighted(&self.cfg.limits),
                motion_replans: replans,
                collided,
                obstacles,
                departed_at: departed,
                motion_wall_ms: wall,
            });
            self.drop_obstacles(self.persistent, obstacles);
            self.passed.push(e);
            self.here = j;
            self.route.push(j);
            let now = self.now();
            self.event(now, EventKind::Arrive { from: i, to: j });

            if j == self.graph.destination() {
                let t_r: T = from_micros(self.ledger.legs);
                return if remaining_time(self.cfg.budget, t_r) >= T::zero() { Outcome::Success } else { Outcome::Timeout };
            }
            if self.ledger.remaining < 0 {
                return Outcome::Timeout;
            }
            if check_replan(path_time, edge.time) == Decision::ReplanMission {
                self.rep += 1;
                plan = match self.plan(Trigger::LostTime { from: i, to: j }) {
                    Ok(p) => p,
                    Err(o) => return o,
                };
                k = 0;
            } else {
                k += 1;
            }
        }
    }
}

/// Runs one mission on `graph` in `env`. Planner failures end the run with an
/// `Infeasible` or `Timeout` outcome; only an invalid configuration is an error.
pub fn run_mission<T: Real, R: Rng + ?Sized>(
    graph: &TaskGraph<T>,
    env: &Environment<T>,
    cfg: &SynchronConfig<T>,
    script: &LegScript<T>,
    rng: &mut R,
) -> Result<MissionReport<T>> {
    cfg.validate()?;
    let graph = Arc::new(graph.clone());
    let mut d = Driver {
        cfg,
        script,
        graph: Arc::clone(&graph),
        rng,
        mission: Worker::new(cfg.mode, mission_worker::<T>),
        motion: Worker::new(cfg.mode, motion_worker::<T>),
        env: env.clone(),
        persistent: env.obstacles().len(),
        ledger: Ledger::new(to_micros(cfg.budget)),
        here: graph.start(),
        passed: Vec::new(),
        blocked: Vec::new(),
        prefetch: None,
        plans: Vec::new(),
        legs: Vec::new(),
        events: Vec::new(),
        route: vec![graph.start()],
        rep: 0,
        charged_mission: 0,
        charged_motion: 0,
        mission_wall_ms: 0.0,
        motion_wall_ms: 0.0,
    };
    let outcome = d.run();
    // a prefetch still in flight is drained so the motion worker can stop
    d.collect_prefetch();
    let now = d.now();
    d.event(now, EventKind::Finish { outcome });

    let budget = cfg.budget;
    let mission_time: T = from_micros(d.ledger.legs);
    let mission_cost = (d.route.len() > 1).then(|| {
        let r = Route::from_nodes(&graph, d.route.clone()).expect("traversed edges exist");
        route_cost(&graph, &r, &MissionBudget { available: budget, weights: cfg.mission_weights }).0
    });
    let path_factor = (!d.legs.is_empty()).then(|| {
        let sum: T = d.legs.iter().map(|l| l.path_cost / l.straight).sum();
        sum / T::of_usize(d.legs.len())
    });
    Ok(MissionReport {
        outcome,
        route: d.route,
        legs: d.legs,
        plans: d.plans,
        events: d.events,
        rep: d.rep,
        budget,
        mission_time,
        remaining_time: remaining_time(budget, mission_time),
        final_budget: from_micros(d.ledger.remaining),
        ledger: d.ledger,
        charged_mission: from_micros(d.charged_mission),
        charged_motion: from_micros(d.charged_motion),
        mission_cost,
        path_factor,
        mission_wall_ms: d.mission_wall_ms,
        motion_wall_ms: d.motion_wall_ms,
    })
}
