//! Reference computations written independently of the library code paths
//! they check. Shared by the integration tests and the acceptance target.
#![allow(dead_code)]

use armpa_core::graph::TaskGraph;

/// Point on a clamped open-uniform B-spline by de Boor's triangular scheme.
pub fn de_boor(cp: &[[f64; 3]], order: usize, u: f64) -> [f64; 3] {
    let n = cp.len();
    let p = order - 1;
    let interior = n - order;
    let mut knots = vec![0.0; order];
    for i in 1..=interior {
        knots.push(i as f64 / (interior + 1) as f64);
    }
    knots.extend(std::iter::repeat(1.0).take(order));
    // span index k with knots[k] <= u < knots[k+1], clamped for u = 1
    let mut k = p;
    while k + 1 < n && knots[k + 1] <= u {
        k += 1;
    }
    let mut d: Vec<[f64; 3]> = (0..=p).map(|j| cp[j + k - p]).collect();
    for r in 1..=p {
        for j in (r..=p).rev() {
            let i = j + k - p;
            let den = knots[i + p + 1 - r] - knots[i];
            let a = if den == 0.0 { 0.0 } else { (u - knots[i]) / den };
            for c in 0..3 {
                d[j][c] = (1.0 - a) * d[j - 1][c] + a * d[j][c];
            }
        }
    }
    d[p]
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Arc length by composite Simpson's rule on a central-difference speed.
pub fn arc_length(cp: &[[f64; 3]], order: usize, intervals: usize) -> f64 {
    let h = 1.0 / intervals as f64;
    let eps = 1e-7;
    let speed = |u: f64| {
        let lo = (u - eps).max(0.0);
        let hi = (u + eps).min(1.0);
        dist(de_boor(cp, order, hi), de_boor(cp, order, lo)) / (hi - lo)
    };
    let mut s = speed(0.0) + speed(1.0);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * speed(i as f64 * h);
    }
    s * h / 3.0
}

/// Chord sum over `samples` uniform parameters.
pub fn chord_sum(cp: &[[f64; 3]], order: usize, samples: usize) -> f64 {
    let pts: Vec<[f64; 3]> = (0..samples).map(|k| de_boor(cp, order, k as f64 / (samples - 1) as f64)).collect();
    pts.windows(2).map(|w| dist(w[0], w[1])).sum()
}

/// Every simple start-to-destination route by depth-first search.
pub fn all_routes(g: &TaskGraph<f64>) -> Vec<Vec<usize>> {
    fn walk(g: &TaskGraph<f64>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let here = *path.last().unwrap();
        if here == g.destination() {
            out.push(path.clone());
            return;
        }
        for &(n, _) in g.neighbors(here) {
            if !path.contains(&n) {
                path.push(n);
                walk(g, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, &mut vec![g.start()], &mut out);
    out
}

/// Time and cost of a node sequence recomputed from waypoint coordinates and
/// task tables with the default weights (1/budget, 1, 1, 1, 10).
pub fn route_time_cost(g: &TaskGraph<f64>, nodes: &[usize], budget: f64) -> (f64, f64) {
    let mut time = 0.0;
    let mut value = 0.0;
    for w in nodes.windows(2) {
        let (a, b) = (g.position(w[0]), g.position(w[1]));
        let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt();
        let e = g.edge(g.edge_between(w[0], w[1]).expect("adjacent"));
        match e.task {
            Some(t) => {
                let task = g.tasks()[t];
                time += d / g.speed() + task.duration;
                value += task.priority / task.risk;
            }
            None => {
                time += d / g.speed();
                value += 1.0;
            }
        }
    }
    let violation = if time > budget { 1.0 - budget / time } else { 0.0 };
    let cost = ((time - budget).abs() / budget + 1.0 / value) * (1.0 + 10.0 * violation);
    (time, cost)
}

/// Optimal route: the cheapest on-time route, or the cheapest overall when
/// none is on time. Returns (nodes, time, cost) and the runner-up cost.
pub fn enumerated_optimum(g: &TaskGraph<f64>, budget: f64) -> ((Vec<usize>, f64, f64), f64) {
    let mut scored: Vec<(Vec<usize>, f64, f64)> = all_routes(g)
        .into_iter()
        .map(|n| {
            let (t, c) = route_time_cost(g, &n, budget);
            (n, t, c)
        })
        .collect();
    let any_on_time = scored.iter().any(|s| s.1 <= budget);
    if any_on_time {
        scored.retain(|s| s.1 <= budget);
    }
    scored.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
    let runner_up = scored.get(1).map_or(f64::INFINITY, |s| s.2);
    (scored.swap_remove(0), runner_up)
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - (icpt + slope * a)).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    1.0 - ss_res / ss_tot
}
