//! Time-budgeted route selection over the task graph.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{constructive_priorities, decode_route, validate_route, Decoded, Route, RouteViolation, TaskGraph, PRIORITY_BOUND};
use crate::opt::{optimize, EngineConfig, OptTrace, Problem};
use crate::scalar::Real;

/// Cost weights. `time_gap` defaults to `1 / available` when absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights<T> {
    pub time_gap: Option<T>,
    pub weight: T,
    pub priority: T,
    pub risk: T,
    pub violation: T,
}

impl<T: Real> Default for CostWeights<T> {
    fn default() -> Self {
        Self { time_gap: None, weight: T::one(), priority: T::one(), risk: T::one(), violation: T::of(10.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionBudget<T> {
    /// Seconds available for the whole route.
    pub available: T,
    pub weights: CostWeights<T>,
}

impl<T: Real> MissionBudget<T> {
    pub fn new(available: T) -> Self {
        Self { available, weights: CostWeights::default() }
    }

    pub fn time_gap_weight(&self) -> T {
        self.weights.time_gap.unwrap_or_else(|| T::one() / self.available)
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        let positive = [self.time_gap_weight(), w.weight, w.priority, w.risk, w.violation]
            .iter()
            .all(|&v| v > T::zero() && v.is_finite());
        if !(self.available > T::zero()) || !positive {
            return Err(Error::Config("budget and every cost weight must be positive".into()));
        }
        Ok(())
    }
}

/// `max(1 - available / time, 0)`.
pub fn time_violation<T: Real>(time: T, available: T) -> T {
    (T::one() - available / time).max(T::zero())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan<T> {
    pub route: Route<T>,
    /// Task index per route edge.
    pub tasks: Vec<Option<usize>>,
    pub time: T,
    pub violation: T,
    pub cost: T,
    pub task_count: usize,
    pub weight: T,
    /// Budget the plan was fitted to.
    pub budget: T,
}

/// Total route time; fails on structurally invalid routes.
pub fn route_time<T: Real>(g: &TaskGraph<T>, nodes: &[usize]) -> Result<T> {
    let structural: Vec<_> = validate_route(g, nodes, T::infinity());
    if !structural.is_empty() {
        return Err(Error::InvalidRoute(format!("{structural:?}")));
    }
    Ok(Route::from_nodes(g, nodes.to_vec())?.time)
}

/// Route cost and time violation:
/// `(phi1 |T - avail| + phi2 / sum(phi3 rho / (phi4 xi))) (1 + phi5 violation)`,
/// with taskless edges contributing 1 to the sum.
pub fn route_cost<T: Real>(g: &TaskGraph<T>, route: &Route<T>, budget: &MissionBudget<T>) -> (T, T) {
    cost_of(g, route.edges.iter().copied(), route.time, budget)
}

fn cost_of<T: Real>(g: &TaskGraph<T>, edges: impl Iterator<Item = usize>, time: T, budget: &MissionBudget<T>) -> (T, T) {
    let w = &budget.weights;
    let value: T = edges
        .map(|e| match g.edge(e).task {
            Some(t) => {
                let task = &g.tasks()[t];
                (w.priority * task.priority) / (w.risk * task.risk)
            }
            None => T::one(),
        })
        .sum();
    let violation = time_violation(time, budget.available);
    let gap = budget.time_gap_weight() * (time - budget.available).abs();
    ((gap + w.weight / value) * (T::one() + w.violation * violation), violation)
}

pub fn make_plan<T: Real>(g: &TaskGraph<T>, route: Route<T>, budget: &MissionBudget<T>) -> MissionPlan<T> {
    let (cost, violation) = route_cost(g, &route, budget);
    MissionPlan {
        tasks: route.edges.iter().map(|&e| g.edge(e).task).collect(),
        time: route.time,
        violation,
        cost,
        task_count: route.task_count(g),
        weight: route.weight,
        budget: budget.available,
        route,
    }
}

/// Priority-vector encoding of the routing problem.
///
/// The search ranks every on-time route ahead of every late one: a late
/// route scores `C_R` plus an offset above the largest cost any on-time route
/// can have on this graph. Reported plan costs are plain `C_R`.
pub struct MissionProblem<'a, T> {
    pub graph: &'a TaskGraph<T>,
    pub budget: MissionBudget<T>,
    bounds: Vec<(T, T)>,
    late_offset: T,
}

impl<'a, T: Real> MissionProblem<'a, T> {
    pub fn new(graph: &'a TaskGraph<T>, budget: MissionBudget<T>) -> Self {
        let b = T::of(PRIORITY_BOUND);
        let w = &budget.weights;
        // an on-time route has gap <= available and value >= its cheapest edge
        let min_value = graph
            .edges()
            .iter()
            .map(|e| match e.task {
                Some(t) => {
                    let task = &graph.tasks()[t];
                    (w.priority * task.priority) / (w.risk * task.risk)
                }
                None => T::one(),
            })
            .fold(T::infinity(), T::min);
        let late_offset = budget.time_gap_weight() * budget.available + w.weight / min_value + T::one();
        Self { graph, budget, bounds: vec![(-b, b); graph.waypoint_count()], late_offset }
    }

    /// Search objective: `C_R`, shifted past every on-time route when late.
    pub fn score(&self, r: &Route<T>) -> T {
        let (cost, violation) = route_cost(self.graph, r, &self.budget);
        if violation > T::zero() {
            cost + self.late_offset
        } else {
            cost
        }
    }
}

impl<T: Real> Problem<T> for MissionProblem<'_, T> {
    type Solution = Route<T>;

    fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    fn decode(&self, x: &[T]) -> Option<Route<T>> {
        match decode_route(self.graph, x) {
            Ok(Decoded::Route(r)) => Some(r),
            _ => None,
        }
    }

    fn evaluate(&self, r: &Route<T>) -> T {
        self.score(r)
    }
}

/// Optimizes the route for the budget. The fewest-hop route seeds the
/// population so initialization always has a decodable member.
pub fn plan_mission<T: Real, R: Rng + ?Sized>(
    g: &TaskGraph<T>,
    budget: &MissionBudget<T>,
    cfg: &EngineConfig<T>,
    rng: &mut R,
) -> Result<(MissionPlan<T>, OptTrace<T>)> {
    budget.validate()?;
    let problem = MissionProblem::new(g, *budget);
    let seed = constructive_priorities(g).ok_or_else(|| Error::Planning("destination unreachable".into()))?;
    let best = optimize(cfg, &problem, rng, &[seed]).map_err(|e| match e {
        Error::Initialization => Error::Planning("no decodable route after the retry budget".into()),
        other => other,
    })?;
    let route = problem
        .decode(&best.position)
        .ok_or_else(|| Error::Planning("best candidate failed to decode".into()))?;
    debug_assert!(validate_route(g, &route.nodes, T::infinity()).is_empty());
    Ok((make_plan(g, route, budget), best.trace))
}

/// Re-plans from `here` on the graph minus the passed edges, the `blocked`
/// edges and every waypoint already visited (except `here`).
pub fn replan_mission<T: Real, R: Rng + ?Sized>(
    g: &TaskGraph<T>,
    passed: &[usize],
    blocked: &[usize],
    here: usize,
    budget: &MissionBudget<T>,
    cfg: &EngineConfig<T>,
    rng: &mut R,
) -> Result<(TaskGraph<T>, MissionPlan<T>, OptTrace<T>)> {
    if let Some(&last) = passed.last() {
        if !g.edge(last).touches(here) {
            return Err(Error::Planning(format!("waypoint {here} is not on the last passed edge")));
        }
    }
    let mut visited: Vec<usize> = passed.iter().flat_map(|&e| [g.edge(e).a, g.edge(e).b]).collect();
    visited.retain(|&n| n != here);
    visited.sort_unstable();
    visited.dedup();
    let mut removed: Vec<usize> = passed.iter().chain(blocked).copied().collect();
    removed.sort_unstable();
    removed.dedup();
    let pruned = match g.pruned(&removed, &visited, here) {
        Ok(p) => p,
        Err(Error::GraphBuild(_)) => return Err(Error::InfeasibleReplan { here }),
        Err(e) => return Err(e),
    };
    let (plan, trace) = plan_mission(&pruned, budget, cfg, rng)?;
    Ok((pruned, plan, trace))
}

/// True when the route is structurally valid (time may exceed the budget).
pub fn is_structurally_valid<T: Real>(g: &TaskGraph<T>, nodes: &[usize]) -> bool {
    validate_route(g, nodes, T::infinity())
        .iter()
        .all(|v| *v == RouteViolation::OverBudget)
}
