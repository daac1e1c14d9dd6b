//! Task set, waypoint network and route decoding.

mod network;
mod route;

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use network::{build_network, NetworkConfig};
pub use route::{constructive_priorities, decode_route, validate_route, Decoded, Route, RouteViolation};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::{uniform, uniform_left_open, Real};

/// Bounds of every priority vector entry.
pub const PRIORITY_BOUND: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task<T> {
    pub id: usize,
    /// In `[1, 10]`.
    pub priority: T,
    /// Risk percentage in `[0.5, 100]`.
    pub risk: T,
    /// Seconds spent performing the task, in `[20, 200]`.
    pub duration: T,
}

/// Smallest admissible risk; keeps `priority / risk` bounded.
pub const MIN_RISK: f64 = 0.5;

/// Draws `count` tasks: priority `U(1, 10)`, risk `U(0, 100]` clamped below at
/// [`MIN_RISK`], duration `U(20, 200)`.
pub fn generate_tasks<T: Real, R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<Task<T>> {
    (0..count)
        .map(|id| {
            let priority = uniform(rng, T::one(), T::of(10.0));
            let risk = uniform_left_open(rng, T::zero(), T::of(100.0)).max(T::of(MIN_RISK));
            let duration = uniform(rng, T::of(20.0), T::of(200.0));
            Task { id, priority, risk, duration }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge<T> {
    /// Endpoints with `a < b`.
    pub a: usize,
    pub b: usize,
    pub task: Option<usize>,
    /// `priority / risk` of the task, or 1 without one.
    pub weight: T,
    /// Euclidean length in meters.
    pub length: T,
    /// Travel time plus task duration in seconds.
    pub time: T,
    /// Task duration, 0 without one.
    pub duration: T,
}

impl<T> Edge<T> {
    pub fn other(&self, n: usize) -> usize {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, n: usize) -> bool {
        self.a == n || self.b == n
    }
}

/// Undirected waypoint graph with per-edge task attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskGraph<T> {
    waypoints: Vec<Vec3<T>>,
    /// Pruned waypoints stay addressable but have no edges.
    active: Vec<bool>,
    edges: Vec<Edge<T>>,
    tasks: Vec<Task<T>>,
    /// `(neighbor, edge index)` per waypoint, sorted by neighbor.
    adjacency: Vec<Vec<(usize, usize)>>,
    start: usize,
    destination: usize,
    speed: T,
}

impl<T: Real> TaskGraph<T> {
    /// Builds the graph and derives every edge attribute. `links` are
    /// `(i, j, task index)` triples.
    pub fn from_parts(
        waypoints: Vec<Vec3<T>>,
        links: &[(usize, usize, Option<usize>)],
        tasks: Vec<Task<T>>,
        start: usize,
        destination: usize,
        speed: T,
    ) -> Result<Self> {
        let active = vec![true; waypoints.len()];
        Self::assemble(waypoints, active, links, tasks, start, destination, speed)
    }

    fn assemble(
        waypoints: Vec<Vec3<T>>,
        active: Vec<bool>,
        links: &[(usize, usize, Option<usize>)],
        tasks: Vec<Task<T>>,
        start: usize,
        destination: usize,
        speed: T,
    ) -> Result<Self> {
        let n = waypoints.len();
        if !(speed > T::zero()) {
            return Err(Error::GraphBuild("speed must be positive".into()));
        }
        if start >= n || destination >= n || start == destination {
            return Err(Error::GraphBuild("start and destination must be distinct waypoints".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(links.len());
        let mut task_used = vec![false; tasks.len()];
        for &(i, j, task) in links {
            if i >= n || j >= n {
                return Err(Error::GraphBuild(format!("edge ({i}, {j}) references a missing waypoint")));
            }
            if i == j {
                return Err(Error::GraphBuild(format!("self-loop at {i}")));
            }
            if !active[i] || !active[j] {
                return Err(Error::GraphBuild(format!("edge ({i}, {j}) touches a pruned waypoint")));
            }
            let (a, b) = (i.min(j), i.max(j));
            let length = waypoints[a].distance(waypoints[b]);
            let (weight, duration) = match task {
                Some(t) => {
                    let task = tasks
                        .get(t)
                        .ok_or_else(|| Error::GraphBuild(format!("edge ({a}, {b}) references missing task {t}")))?;
                    if std::mem::replace(&mut task_used[t], true) {
                        return Err(Error::GraphBuild(format!("task {t} assigned to two edges")));
                    }
                    (task.priority / task.risk, task.duration)
                }
                None => (T::one(), T::zero()),
            };
            let idx = edges.len();
            edges.push(Edge { a, b, task, weight, length, time: length / speed + duration, duration });
            adjacency[a].push((b, idx));
            adjacency[b].push((a, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::GraphBuild("duplicate edge".into()));
            }
        }
        let g = Self { waypoints, active, edges, tasks, adjacency, start, destination, speed };
        if !g.reachable(start, destination) {
            return Err(Error::GraphBuild("destination unreachable from start".into()));
        }
        Ok(g)
    }

    pub fn waypoint_count(&self) -> usize {
        self.waypoints.len()
    }

    /// Waypoints that still carry edges or are endpoints.
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn is_active(&self, n: usize) -> bool {
        self.active[n]
    }

    pub fn waypoints(&self) -> &[Vec3<T>] {
        &self.waypoints
    }

    pub fn position(&self, n: usize) -> Vec3<T> {
        self.waypoints[n]
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge<T> {
        &self.edges[e]
    }

    pub fn tasks(&self) -> &[Task<T>] {
        &self.tasks
    }

    pub fn neighbors(&self, n: usize) -> &[(usize, usize)] {
        &self.adjacency[n]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn destination(&self) -> usize {
        self.destination
    }

    pub fn speed(&self) -> T {
        self.speed
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by_key(&b, |&(n, _)| n).ok().map(|i| list[i].1)
    }

    /// Dense symmetric adjacency matrix.
    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.waypoints.len();
        let mut m = vec![vec![false; n]; n];
        for e in &self.edges {
            m[e.a][e.b] = true;
            m[e.b][e.a] = true;
        }
        m
    }

    pub fn reachable(&self, from: usize, to: usize) -> bool {
        self.hop_path(from, to).is_some()
    }

    /// Fewest-hop path, ties broken towards lower waypoint ids.
    pub fn hop_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let n = self.waypoints.len();
        let mut parent = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::from([from]);
        parent[from] = from;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut c = to;
                while c != from {
                    c = parent[c];
                    path.push(c);
                }
                path.reverse();
                return Some(path);
            }
            for &(v, _) in &self.adjacency[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Copy with the given edges and waypoints removed and a new start.
    /// Removed waypoints keep their ids but lose every incident edge.
    pub fn pruned(&self, removed_edges: &[usize], removed_nodes: &[usize], start: usize) -> Result<Self> {
        let mut active = self.active.clone();
        for &n in removed_nodes {
            if n == start || n == self.destination {
                continue;
            }
            active[n] = false;
        }
        let links: Vec<_> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, e)| !removed_edges.contains(i) && active[e.a] && active[e.b])
            .map(|(_, e)| (e.a, e.b, e.task))
            .collect();
        Self::assemble(
            self.waypoints.clone(),
            active,
            &links,
            self.tasks.clone(),
            start,
            self.destination,
            self.speed,
        )
    }

    fn to_file(&self) -> GraphFile<T> {
        GraphFile {
            speed: self.speed,
            start: self.start,
            destination: self.destination,
            waypoints: self
                .waypoints
                .iter()
                .enumerate()
                .map(|(id, p)| WaypointRecord { id, x: p.x, y: p.y, z: p.z })
                .collect(),
            edges: self.edges.iter().map(|e| EdgeRecord { i: e.a, j: e.b, task: e.task }).collect(),
            tasks: self.tasks.clone(),
            pruned: (0..self.active.len()).filter(|&i| !self.active[i]).collect(),
        }
    }

    fn from_file(f: GraphFile<T>) -> Result<Self> {
        let mut waypoints = vec![Vec3::zero(); f.waypoints.len()];
        for w in &f.waypoints {
            let slot = waypoints
                .get_mut(w.id)
                .ok_or_else(|| Error::Parse(format!("waypoint id {} out of range", w.id)))?;
            *slot = Vec3::new(w.x, w.y, w.z);
        }
        let mut active = vec![true; waypoints.len()];
        for &p in &f.pruned {
            if p < active.len() {
                active[p] = false;
            }
        }
        let links: Vec<_> = f.edges.iter().map(|e| (e.i, e.j, e.task)).collect();
        Self::assemble(waypoints, active, &links, f.tasks, f.start, f.destination, f.speed)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.to_file())?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Self::from_file(serde_json::from_reader(r)?)
    }
}

impl<T: Real> Serialize for TaskGraph<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for TaskGraph<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = GraphFile::deserialize(d)?;
        Self::from_file(f).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile<T> {
    speed: T,
    start: usize,
    destination: usize,
    waypoints: Vec<WaypointRecord<T>>,
    edges: Vec<EdgeRecord>,
    tasks: Vec<Task<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pruned: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct WaypointRecord<T> {
    id: usize,
    x: T,
    y: T,
    z: T,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    i: usize,
    j: usize,
    task: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn task_draws_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for t in generate_tasks::<f64, _>(10_000, &mut rng) {
            assert!((1.0..=10.0).contains(&t.priority));
            assert!(t.risk >= MIN_RISK && t.risk <= 100.0);
            assert!((20.0..=200.0).contains(&t.duration));
        }
    }

    #[test]
    fn edge_attributes() {
        let tasks = vec![Task { id: 0, priority: 8.0, risk: 4.0, duration: 30.0 }];
        let g = TaskGraph::from_parts(
            vec![Vec3::zero(), Vec3::new(300.0, 400.0, 0.0), Vec3::new(0.0, 10.0, 0.0)],
            &[(0, 1, None), (1, 2, Some(0))],
            tasks,
            0,
            2,
            2.5,
        )
        .unwrap();
        let e = g.edge(0);
        assert_eq!((e.length, e.time, e.weight), (500.0, 200.0, 1.0));
        let t = g.edge(g.edge_between(2, 1).unwrap());
        assert_eq!(t.weight, 2.0);
        assert_eq!(t.time, t.length / 2.5 + 30.0);
    }

    #[test]
    fn self_loop_and_disconnection_are_rejected() {
        let w = vec![Vec3::<f64>::zero(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)];
        assert!(TaskGraph::from_parts(w.clone(), &[(1, 1, None)], vec![], 0, 2, 1.0).is_err());
        assert!(TaskGraph::from_parts(w, &[(0, 1, None)], vec![], 0, 2, 1.0).is_err());
    }

    #[test]
    fn pruning_isolates_waypoints() {
        let w: Vec<Vec3<f64>> = (0..4).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let g = TaskGraph::from_parts(w, &[(0, 1, None), (1, 2, None), (0, 3, None), (3, 2, None)], vec![], 0, 2, 1.0)
            .unwrap();
        let p = g.pruned(&[g.edge_between(0, 1).unwrap()], &[], 0).unwrap();
        assert_eq!(p.edges().len(), 3);
        let q = g.pruned(&[g.edge_between(0, 1).unwrap()], &[1], 0).unwrap();
        assert_eq!(q.active_count(), 3);
        assert!(g.pruned(&[], &[3, 1], 0).is_err());
    }
}
