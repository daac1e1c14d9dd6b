use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kinematics::{path_kinematics, PathState};
use super::spline::{polyline_length, SplineSampler};
use super::violations::{path_violations, Violations};
use super::VehicleLimits;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};
use crate::opt::{optimize, EngineConfig, OptTrace, Problem};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionConfig<T> {
    pub engine: EngineConfig<T>,
    /// Control points including both anchored endpoints.
    pub control_points: usize,
    /// Spline order (degree + 1).
    pub order: usize,
    pub samples: usize,
    /// Horizontal padding of the control-point search box around the endpoints.
    pub margin_xy: T,
    /// Vertical padding of the search box, clipped to the depth limits.
    pub margin_z: T,
    /// Seed the population with evenly spaced points on the straight segment.
    pub seed_straight_line: bool,
}

impl<T: Real> Default for MotionConfig<T> {
    fn default() -> Self {
        Self {
            engine: EngineConfig::motion_default(),
            control_points: 5,
            order: 4,
            samples: 100,
            margin_xy: T::of(500.0),
            margin_z: T::of(20.0),
            seed_straight_line: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSolution<T> {
    pub control_points: Vec<Vec3<T>>,
    pub states: Vec<PathState<T>>,
    pub length: T,
    pub time: T,
    pub violations: Violations<T>,
    pub cost: T,
}

impl<T: Real> PathSolution<T> {
    pub fn start(&self) -> Vec3<T> {
        self.control_points[0]
    }

    pub fn end(&self) -> Vec3<T> {
        *self.control_points.last().expect("anchored endpoints")
    }

    pub fn positions(&self) -> Vec<Vec3<T>> {
        self.states.iter().map(|s| s.position).collect()
    }

    /// Flattened interior control points, the optimizer's encoding.
    pub fn interior(&self) -> Vec<T> {
        let n = self.control_points.len();
        self.control_points[1..n - 1].iter().flat_map(|p| p.to_array()).collect()
    }

    pub fn write_states_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,y,z,psi,theta,u,v,w")?;
        for s in &self.states {
            let p = s.position;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                s.t, p.x, p.y, p.z, s.heading, s.pitch, s.u, s.v, s.w
            )?;
        }
        Ok(())
    }
}

/// Control-point encoding of one leg.
pub struct MotionProblem<'a, T> {
    pub env: &'a Environment<T>,
    pub a: Vec3<T>,
    pub b: Vec3<T>,
    pub limits: VehicleLimits<T>,
    sampler: SplineSampler<T>,
    bounds: Vec<(T, T)>,
    region: Aabb<T>,
}

impl<'a, T: Real> MotionProblem<'a, T> {
    pub fn new(env: &'a Environment<T>, a: Vec3<T>, b: Vec3<T>, limits: VehicleLimits<T>, cfg: &MotionConfig<T>) -> Result<Self> {
        limits.validate()?;
        let sampler = SplineSampler::new(cfg.control_points, cfg.order, cfg.samples)?;
        let span = Aabb::spanned(a, b).padded_xy(cfg.margin_xy);
        let padded = Aabb {
            min: Vec3::new(span.min.x, span.min.y, span.min.z - cfg.margin_z),
            max: Vec3::new(span.max.x, span.max.y, span.max.z + cfg.margin_z),
        };
        let mut limit_box = env.bounds();
        limit_box.min.z = limit_box.min.z.max(limits.depth.0);
        limit_box.max.z = limit_box.max.z.min(limits.depth.1);
        let mut region = padded.intersect(&limit_box);
        // keep the endpoints themselves admissible even if they sit on a limit
        region = Aabb {
            min: Vec3::new(region.min.x.min(a.x.min(b.x)), region.min.y.min(a.y.min(b.y)), region.min.z.min(a.z.min(b.z))),
            max: Vec3::new(region.max.x.max(a.x.max(b.x)), region.max.y.max(a.y.max(b.y)), region.max.z.max(a.z.max(b.z))),
        };
        let axis = [
            (region.min.x, region.max.x),
            (region.min.y, region.max.y),
            (region.min.z, region.max.z),
        ];
        if axis.iter().any(|&(lo, hi)| !(lo < hi)) {
            return Err(Error::Config("control-point search box is empty".into()));
        }
        let free = cfg.control_points - 2;
        let bounds = (0..free).flat_map(|_| axis).collect();
        Ok(Self { env, a, b, limits, sampler, bounds, region })
    }

    /// Box the interior control points are confined to.
    pub fn region(&self) -> Aabb<T> {
        self.region
    }

    pub fn control_points(&self, x: &[T]) -> Vec<Vec3<T>> {
        let mut cp = Vec::with_capacity(self.sampler.control_points);
        cp.push(self.a);
        cp.extend(x.chunks_exact(3).map(Vec3::from_slice));
        cp.push(self.b);
        cp
    }

    /// Interior encoding of the straight segment.
    pub fn straight_line(&self) -> Vec<T> {
        let n = self.sampler.control_points;
        (1..n - 1)
            .flat_map(|i| self.a.lerp(self.b, T::of_usize(i) / T::of_usize(n - 1)).to_array())
            .collect()
    }

    pub fn solution(&self, cp: Vec<Vec3<T>>) -> PathSolution<T> {
        let positions = self.sampler.sample(&cp);
        let states = path_kinematics(&positions, self.env.current(), &self.limits, T::zero());
        let length = polyline_length(&positions);
        let violations = path_violations(&states, self.env, &self.limits);
        PathSolution {
            control_points: cp,
            states,
            length,
            time: length / self.limits.speed,
            cost: length + violations.weighted(&self.limits),
            violations,
        }
    }
}

impl<T: Real> Problem<T> for MotionProblem<'_, T> {
    type Solution = PathSolution<T>;

    fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    fn decode(&self, x: &[T]) -> Option<PathSolution<T>> {
        Some(self.solution(self.control_points(x)))
    }

    fn evaluate(&self, s: &PathSolution<T>) -> T {
        s.cost
    }
}

/// Cost of an arbitrary solution: length plus weighted violations.
pub fn path_cost<T: Real>(sol: &PathSolution<T>, limits: &VehicleLimits<T>) -> T {
    sol.length + sol.violations.weighted(limits)
}

/// Plans a leg from `a` to `b` on the snapshot.
pub fn plan_path<T: Real, R: Rng + ?Sized>(
    env: &Environment<T>,
    a: Vec3<T>,
    b: Vec3<T>,
    limits: &VehicleLimits<T>,
    cfg: &MotionConfig<T>,
    rng: &mut R,
    warm_start: Option<&PathSolution<T>>,
) -> Result<(PathSolution<T>, OptTrace<T>)> {
    if env.grid.is_forbidden(a.x, a.y) {
        return Err(Error::Endpoint("start"));
    }
    if env.grid.is_forbidden(b.x, b.y) {
        return Err(Error::Endpoint("destination"));
    }
    let problem = MotionProblem::new(env, a, b, *limits, cfg)?;
    let mut seeds = Vec::new();
    if let Some(w) = warm_start {
        if w.control_points.len() == cfg.control_points {
            seeds.push(w.interior());
        }
    }
    if cfg.seed_straight_line {
        seeds.push(problem.straight_line());
    }
    let best = optimize(&cfg.engine, &problem, rng, &seeds)?;
    let sol = problem.solution(problem.control_points(&best.position));
    Ok((sol, best.trace))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replanned<T> {
    pub solution: PathSolution<T>,
    /// The previous path, re-anchored at the vehicle, was at least as cheap.
    pub kept_previous: bool,
    pub trace: OptTrace<T>,
}

/// Re-plans the remainder of a leg from the vehicle position, seeding the
/// search with the previous control points. The previous path re-anchored at
/// the vehicle is kept whenever the new search does not beat it.
pub fn replan_path<T: Real, R: Rng + ?Sized>(
    prev: &PathSolution<T>,
    env: &Environment<T>,
    position: Vec3<T>,
    limits: &VehicleLimits<T>,
    cfg: &MotionConfig<T>,
    rng: &mut R,
) -> Result<Replanned<T>> {
    let problem = MotionProblem::new(env, position, prev.end(), *limits, cfg)?;
    let mut reanchored_cp = prev.control_points.clone();
    reanchored_cp[0] = position;
    let previous = problem.solution(reanchored_cp);
    let mut seeds = vec![prev.interior()];
    if cfg.seed_straight_line {
        seeds.push(problem.straight_line());
    }
    let best = optimize(&cfg.engine, &problem, rng, &seeds)?;
    let fresh = problem.solution(problem.control_points(&best.position));
    if fresh.cost < previous.cost {
        Ok(Replanned { solution: fresh, kept_previous: false, trace: best.trace })
    } else {
        Ok(Replanned { solution: previous, kept_previous: true, trace: best.trace })
    }
}
