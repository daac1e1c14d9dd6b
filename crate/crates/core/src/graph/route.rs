use serde::{Deserialize, Serialize};

use super::{TaskGraph, PRIORITY_BOUND};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Start-to-destination waypoint sequence with its derived totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route<T> {
    pub nodes: Vec<usize>,
    /// Edge index of every consecutive pair.
    pub edges: Vec<usize>,
    /// Sum of edge times in seconds.
    pub time: T,
    /// Sum of edge weights.
    pub weight: T,
}

impl<T: Real> Route<T> {
    /// Resolves the edges of a node sequence; fails when a pair is not adjacent.
    pub fn from_nodes(g: &TaskGraph<T>, nodes: Vec<usize>) -> Result<Self> {
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        let mut time = T::zero();
        let mut weight = T::zero();
        for w in nodes.windows(2) {
            let e = g
                .edge_between(w[0], w[1])
                .ok_or_else(|| Error::InvalidRoute(format!("no edge between {} and {}", w[0], w[1])))?;
            edges.push(e);
            time = time + g.edge(e).time;
            weight = weight + g.edge(e).weight;
        }
        Ok(Self { nodes, edges, time, weight })
    }

    /// Selected-edge indicator per graph edge.
    pub fn selected(&self, g: &TaskGraph<T>) -> Vec<bool> {
        let mut s = vec![false; g.edges().len()];
        for &e in &self.edges {
            s[e] = true;
        }
        s
    }

    pub fn task_count(&self, g: &TaskGraph<T>) -> usize {
        self.edges.iter().filter(|&&e| g.edge(e).task.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decoded<T> {
    Route(Route<T>),
    /// Walk that got stuck before the destination.
    DeadEnd(Vec<usize>),
}

impl<T> Decoded<T> {
    pub fn route(self) -> Option<Route<T>> {
        match self {
            Decoded::Route(r) => Some(r),
            Decoded::DeadEnd(_) => None,
        }
    }
}

/// Greedy priority walk: from the current waypoint step to the unvisited
/// neighbor with the largest priority (lower id on ties) until the destination
/// is reached or no unvisited neighbor remains.
pub fn decode_route<T: Real>(g: &TaskGraph<T>, u: &[T]) -> Result<Decoded<T>> {
    if u.len() != g.waypoint_count() {
        return Err(Error::InvalidRoute(format!(
            "priority vector has {} entries for {} waypoints",
            u.len(),
            g.waypoint_count()
        )));
    }
    let mut visited = vec![false; u.len()];
    let mut current = g.start();
    visited[current] = true;
    let mut nodes = vec![current];
    let mut edges = Vec::new();
    let mut time = T::zero();
    let mut weight = T::zero();
    while current != g.destination() {
        let mut best: Option<(usize, usize)> = None;
        for &(v, e) in g.neighbors(current) {
            if visited[v] {
                continue;
            }
            match best {
                Some((b, _)) if !(u[v] > u[b]) => {}
                _ => best = Some((v, e)),
            }
        }
        let Some((next, e)) = best else {
            return Ok(Decoded::DeadEnd(nodes));
        };
        visited[next] = true;
        nodes.push(next);
        edges.push(e);
        time = time + g.edge(e).time;
        weight = weight + g.edge(e).weight;
        current = next;
    }
    Ok(Decoded::Route(Route { nodes, edges, time, weight }))
}

/// Priority vector that decodes to the fewest-hop route: route waypoints get
/// the upper bound, everything else the lower bound.
pub fn constructive_priorities<T: Real>(g: &TaskGraph<T>) -> Option<Vec<T>> {
    let path = g.hop_path(g.start(), g.destination())?;
    let mut u = vec![-T::of(PRIORITY_BOUND); g.waypoint_count()];
    for n in path {
        u[n] = T::of(PRIORITY_BOUND);
    }
    Some(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteViolation {
    Endpoints,
    MissingEdge,
    RepeatedNode,
    RepeatedEdge,
    OverBudget,
}

/// Criteria the node sequence violates, each reported once, in declaration order.
pub fn validate_route<T: Real>(g: &TaskGraph<T>, nodes: &[usize], budget: T) -> Vec<RouteViolation> {
    let mut found = [false; 5];
    if nodes.first() != Some(&g.start()) || nodes.last() != Some(&g.destination()) {
        found[0] = true;
    }
    let mut seen_nodes = vec![false; g.waypoint_count()];
    for &n in nodes {
        if n >= seen_nodes.len() {
            found[1] = true;
            continue;
        }
        if std::mem::replace(&mut seen_nodes[n], true) {
            found[2] = true;
        }
    }
    let mut seen_edges = vec![false; g.edges().len()];
    let mut time = T::zero();
    for w in nodes.windows(2) {
        match g.edge_between(w[0], w[1]) {
            Some(e) => {
                if std::mem::replace(&mut seen_edges[e], true) {
                    found[3] = true;
                }
                time = time + g.edge(e).time;
            }
            None => found[1] = true,
        }
    }
    if time > budget {
        found[4] = true;
    }
    use RouteViolation::*;
    [Endpoints, MissingEdge, RepeatedNode, RepeatedEdge, OverBudget]
        .into_iter()
        .zip(found)
        .filter_map(|(v, f)| f.then_some(v))
        .collect()
}
