use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::route::{constructive_priorities, decode_route, Decoded};
use super::{Task, TaskGraph};
use crate::env::TraversabilityGrid;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::{uniform, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig<T> {
    /// Nearest reachable neighbors linked from every waypoint.
    pub neighbors: usize,
    /// Target edge count as a multiple of the waypoint count.
    pub edge_density: T,
    /// Extra edges are drawn among pairs at most this many times the median
    /// nearest-neighbor edge length apart.
    pub extra_reach: T,
    pub depth_range: (T, T),
    /// Vehicle speed in m/s.
    pub speed: T,
    /// Rejection-sampling budget per waypoint.
    pub max_draws: usize,
}

impl<T: Real> Default for NetworkConfig<T> {
    fn default() -> Self {
        Self {
            neighbors: 4,
            edge_density: T::of(3.0),
            extra_reach: T::two(),
            depth_range: (T::zero(), T::of(100.0)),
            speed: T::of(2.5),
            max_draws: 100_000,
        }
    }
}

/// Scatters waypoints over the main water body, links each to its nearest reachable
/// neighbors, repairs connectivity, tops up to the target density with random
/// short edges and hands tasks to a random edge subset.
///
/// The start is the waypoint nearest the map origin and the destination the
/// one farthest from the start.
pub fn build_network<T: Real, R: Rng + ?Sized>(
    grid: &TraversabilityGrid<T>,
    n_nodes: usize,
    tasks: Vec<Task<T>>,
    cfg: &NetworkConfig<T>,
    rng: &mut R,
) -> Result<TaskGraph<T>> {
    if n_nodes < 2 {
        return Err(Error::GraphBuild("at least two waypoints are required".into()));
    }
    let (ex, ey) = grid.extent();
    let main = grid.main_water_body();
    let in_main = |x: T, y: T| grid.raster.cell_at(x, y).is_some_and(|(c, r)| main[r * grid.width() + c]);
    let draw = |rng: &mut R| {
        for _ in 0..cfg.max_draws {
            let x = uniform(rng, T::zero(), ex);
            let y = uniform(rng, T::zero(), ey);
            let z = uniform(rng, cfg.depth_range.0, cfg.depth_range.1);
            if grid.is_water(x, y) && in_main(x, y) {
                return Ok(Vec3::new(x, y, z));
            }
        }
        Err(Error::GraphBuild("could not place a waypoint in water".into()))
    };
    let mut points = (0..n_nodes).map(|_| draw(rng)).collect::<Result<Vec<_>>>()?;

    // waypoints with no line of sight to the rest are redrawn
    let mut rounds = 0;
    let Links { mut linked, mut pairs, mut knn_lengths } = loop {
        match link_waypoints(grid, &points, cfg.neighbors) {
            Ok(links) => break links,
            Err(stranded) if rounds < REDRAW_ROUNDS => {
                rounds += 1;
                for i in stranded {
                    points[i] = draw(rng)?;
                }
            }
            Err(_) => return Err(Error::GraphBuild("waypoints cannot be connected through water".into())),
        }
    };
    let n = points.len();
    let link = |i: usize, j: usize, linked: &mut Vec<Vec<bool>>, pairs: &mut Vec<(usize, usize)>| {
        if !linked[i][j] {
            linked[i][j] = true;
            linked[j][i] = true;
            pairs.push((i.min(j), i.max(j)));
        }
    };

    let target = (cfg.edge_density * T::of_usize(n)).round().to_usize().unwrap_or(0);
    if pairs.len() < target {
        knn_lengths.sort_by(|a, b| a.partial_cmp(b).expect("finite lengths"));
        let reach = knn_lengths.get(knn_lengths.len() / 2).copied().unwrap_or(T::zero()) * cfg.extra_reach;
        let mut candidates: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !linked[i][j] && points[i].distance(points[j]) <= reach)
            .collect();
        candidates.shuffle(rng);
        for (i, j) in candidates {
            if pairs.len() >= target {
                break;
            }
            if grid.segment_clear(points[i], points[j]) {
                link(i, j, &mut linked, &mut pairs);
            }
        }
    }

    let mut slots: Vec<usize> = (0..pairs.len()).collect();
    slots.shuffle(rng);
    let mut assigned = vec![None; pairs.len()];
    for (t, &slot) in slots.iter().take(tasks.len()).enumerate() {
        assigned[slot] = Some(t);
    }
    let links: Vec<_> = pairs.iter().zip(&assigned).map(|(&(i, j), &t)| (i, j, t)).collect();

    let origin = Vec3::zero();
    let start = (0..n)
        .min_by(|&a, &b| {
            points[a].horizontal_distance(origin).partial_cmp(&points[b].horizontal_distance(origin)).expect("finite")
        })
        .expect("nonempty");
    let destination = (0..n)
        .filter(|&i| i != start)
        .max_by(|&a, &b| {
            points[start]
                .horizontal_distance(points[a])
                .partial_cmp(&points[start].horizontal_distance(points[b]))
                .expect("finite")
        })
        .expect("two waypoints");

    let g = TaskGraph::from_parts(points, &links, tasks, start, destination, cfg.speed)?;
    let u = constructive_priorities(&g).ok_or_else(|| Error::GraphBuild("destination unreachable".into()))?;
    match decode_route(&g, &u)? {
        Decoded::Route(_) => Ok(g),
        Decoded::DeadEnd(_) => Err(Error::GraphBuild("no priority vector decodes to a route".into())),
    }
}

const REDRAW_ROUNDS: usize = 50;

struct Links<T> {
    linked: Vec<Vec<bool>>,
    pairs: Vec<(usize, usize)>,
    knn_lengths: Vec<T>,
}

/// Links every waypoint to its nearest visible neighbors, then joins
/// components through their closest visible pair until one remains. On
/// failure returns the waypoints outside the largest component.
fn link_waypoints<T: Real>(grid: &TraversabilityGrid<T>, points: &[Vec3<T>], neighbors: usize) -> std::result::Result<Links<T>, Vec<usize>> {
    let n = points.len();
    let mut links = Links { linked: vec![vec![false; n]; n], pairs: Vec::new(), knn_lengths: Vec::new() };
    let link = |i: usize, j: usize, links: &mut Links<T>| {
        if !links.linked[i][j] {
            links.linked[i][j] = true;
            links.linked[j][i] = true;
            links.pairs.push((i.min(j), i.max(j)));
        }
    };
    let by_distance = |i: usize, a: &usize, b: &usize| {
        points[i].distance(points[*a]).partial_cmp(&points[i].distance(points[*b])).expect("finite distances")
    };
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|a, b| by_distance(i, a, b));
        let mut taken = 0;
        for j in order {
            if taken == neighbors {
                break;
            }
            if grid.segment_clear(points[i], points[j]) {
                links.knn_lengths.push(points[i].distance(points[j]));
                link(i, j, &mut links);
                taken += 1;
            }
        }
    }
    let mut all_pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    all_pairs.sort_by(|&(a, b), &(c, d)| {
        points[a].distance(points[b]).partial_cmp(&points[c].distance(points[d])).expect("finite distances")
    });
    loop {
        let comp = components(n, &links.pairs);
        if comp.iter().all(|&c| c == comp[0]) {
            return Ok(links);
        }
        let bridge = all_pairs.iter().find(|&&(i, j)| comp[i] != comp[j] && grid.segment_clear(points[i], points[j]));
        match bridge {
            Some(&(i, j)) => link(i, j, &mut links),
            None => {
                let mut size = vec![0; n];
                comp.iter().for_each(|&c| size[c] += 1);
                let largest = (0..n).max_by_key(|&c| (size[c], std::cmp::Reverse(c))).expect("nonempty");
                return Err((0..n).filter(|&i| comp[i] != largest).collect());
            }
        }
    }
}

fn components(n: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_tasks;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn built_graph_is_connected_and_tasked() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let grid = TraversabilityGrid::<f64>::open_water(100, 100, 100.0).unwrap();
        let tasks = generate_tasks(30, &mut rng);
        let g = build_network(&grid, 40, tasks, &NetworkConfig::default(), &mut rng).unwrap();
        assert_eq!(g.waypoint_count(), 40);
        assert!(g.edges().len() >= 80);
        assert_eq!(g.edges().iter().filter(|e| e.task.is_some()).count(), 30);
        assert!(g.waypoints().iter().all(|p| p.z >= 0.0 && p.z <= 100.0));
        for i in 1..40 {
            assert!(g.reachable(0, i));
        }
    }

    #[test]
    fn two_nodes_give_one_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let grid = TraversabilityGrid::<f64>::open_water(10, 10, 10.0).unwrap();
        let cfg = NetworkConfig { edge_density: 0.0, ..NetworkConfig::default() };
        let g = build_network(&grid, 2, vec![], &cfg, &mut rng).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edge(0).weight, 1.0);
    }
}
