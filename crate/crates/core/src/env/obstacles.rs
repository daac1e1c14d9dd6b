//! Static obstacles with uncertain radius and buoyant obstacles drifting
//! with the current.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::current::CurrentField;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};
use crate::scalar::{normal, uniform, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    StaticUncertain,
    Buoyant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle<T> {
    pub kind: ObstacleKind,
    pub center: Vec3<T>,
    /// Radius the obstacle was spawned with.
    pub nominal_radius: T,
    /// Currently measured radius, always positive.
    pub radius: T,
    pub radius_uncertainty: T,
    /// Self-motivated drift in m/s; zero for static obstacles.
    pub velocity: Vec3<T>,
    /// Standard deviation of the per-step noise.
    pub noise_sigma: T,
    /// Radius recursion gains `(B1, B2, B3)`.
    pub radius_gain: (T, T, T),
    /// Environment step at which the obstacle was observed.
    pub spawn_step: u64,
}

/// Spawn parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSpec<T> {
    pub static_count: usize,
    pub buoyant_count: usize,
    pub radius_range: (T, T),
    /// Upper bound of the uniform radius uncertainty draw.
    pub uncertainty_max: T,
    /// Center spread around the box midpoint as a fraction of its half-size.
    pub center_spread: T,
    pub noise_sigma: T,
    /// Upper bound of the self-motivated drift speed, m/s.
    pub drift_speed_max: T,
    pub radius_gain: (T, T, T),
    /// Extra distance kept between each collision boundary and the endpoints.
    pub endpoint_clearance: T,
    pub min_radius: T,
}

impl<T: Real> Default for ObstacleSpec<T> {
    fn default() -> Self {
        Self {
            static_count: 3,
            buoyant_count: 3,
            radius_range: (T::of(30.0), T::of(80.0)),
            uncertainty_max: T::of(5.0),
            center_spread: T::half(),
            noise_sigma: T::half(),
            drift_speed_max: T::of(0.1),
            radius_gain: (T::one(), T::one(), T::zero()),
            endpoint_clearance: T::of(50.0),
            min_radius: T::one(),
        }
    }
}

impl<T: Real> ObstacleSpec<T> {
    pub fn none() -> Self {
        Self { static_count: 0, buoyant_count: 0, ..Self::default() }
    }

    pub fn count(&self) -> usize {
        self.static_count + self.buoyant_count
    }
}

/// How obstacles respond to the current between steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleDynamics<T> {
    /// Scale of the half-normal coupling between current and buoyant drift.
    pub coupling_sigma: T,
    /// Simulated seconds per environment step.
    pub step_seconds: T,
}

impl<T: Real> Default for ObstacleDynamics<T> {
    fn default() -> Self {
        Self { coupling_sigma: T::of(0.3), step_seconds: T::of(60.0) }
    }
}

/// Confidence inflation of the collision radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryModel<T> {
    /// Normal quantile applied to the radius uncertainty.
    pub z: T,
    /// Linear growth of the inflation per elapsed step.
    pub growth: T,
}

impl<T: Real> Default for BoundaryModel<T> {
    fn default() -> Self {
        // 99th percentile of the standard normal
        Self { z: T::of(2.326_347_874_040_840_8), growth: T::of(0.01) }
    }
}

/// Effective radius `r + z * r_u * (1 + growth * elapsed)`.
pub fn collision_boundary<T: Real>(o: &Obstacle<T>, elapsed: u64, model: &BoundaryModel<T>) -> T {
    let grown = T::one() + model.growth * T::of(elapsed as f64);
    o.radius + model.z * o.radius_uncertainty * grown
}

const PLACEMENT_ATTEMPTS: usize = 200;

/// Places obstacles between `a` and `b`. Centers stay inside the box spanned by
/// the endpoints, shrunk horizontally by each obstacle's radius, and keep their
/// collision boundary clear of both endpoints.
pub fn spawn_obstacles<T: Real, R: Rng + ?Sized>(
    spec: &ObstacleSpec<T>,
    a: Vec3<T>,
    b: Vec3<T>,
    step: u64,
    boundary: &BoundaryModel<T>,
    rng: &mut R,
) -> Result<Vec<Obstacle<T>>> {
    if spec.count() == 0 {
        return Ok(Vec::new());
    }
    if a == b {
        return Err(Error::Placement("start and destination coincide".into()));
    }
    if !(spec.radius_range.0 > T::zero() && spec.radius_range.1 >= spec.radius_range.0) {
        return Err(Error::Config("obstacle radius range must be positive".into()));
    }
    let span = Aabb::spanned(a, b);
    let mut out = Vec::with_capacity(spec.count());
    let kinds = std::iter::repeat(ObstacleKind::StaticUncertain)
        .take(spec.static_count)
        .chain(std::iter::repeat(ObstacleKind::Buoyant).take(spec.buoyant_count));
    for kind in kinds {
        let nominal = uniform(rng, spec.radius_range.0, spec.radius_range.1);
        let uncertainty = uniform(rng, T::zero(), spec.uncertainty_max);
        let radius = normal(rng, nominal, uncertainty).max(spec.min_radius);
        let inner = span.padded_xy(-radius);
        if inner.min.x > inner.max.x || inner.min.y > inner.max.y {
            return Err(Error::Placement(format!(
                "obstacle radius {radius} does not fit between the endpoints"
            )));
        }
        let mid = (inner.min + inner.max) * T::half();
        let half = (inner.max - inner.min) * T::half();
        let mut obstacle = Obstacle {
            kind,
            center: mid,
            nominal_radius: radius,
            radius,
            radius_uncertainty: uncertainty,
            velocity: Vec3::zero(),
            noise_sigma: spec.noise_sigma,
            radius_gain: spec.radius_gain,
            spawn_step: step,
        };
        let clearance = collision_boundary(&obstacle, 0, boundary) + spec.endpoint_clearance;
        let mut placed = false;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let c = Vec3::new(
                normal(rng, mid.x, spec.center_spread * half.x),
                normal(rng, mid.y, spec.center_spread * half.y),
                uniform(rng, inner.min.z, inner.max.z),
            );
            if inner.contains(c) && c.distance(a) > clearance && c.distance(b) > clearance {
                obstacle.center = c;
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Placement("no admissible center after repeated draws".into()));
        }
        if kind == ObstacleKind::Buoyant {
            let speed = uniform(rng, T::zero(), spec.drift_speed_max);
            let heading = uniform(rng, -T::PI(), T::PI());
            obstacle.velocity = Vec3::new(speed * heading.cos(), speed * heading.sin(), T::zero());
        }
        out.push(obstacle);
    }
    Ok(out)
}

/// One environment step. Static obstacles redraw their measured radius around
/// the nominal value; buoyant ones drift with a random fraction of the local
/// current plus their own velocity and update the radius recursively.
pub fn evolve_obstacles<T: Real, R: Rng + ?Sized>(
    set: &[Obstacle<T>],
    field: &CurrentField<T>,
    dynamics: &ObstacleDynamics<T>,
    min_radius: T,
    rng: &mut R,
) -> Vec<Obstacle<T>> {
    set.iter()
        .map(|o| {
            let mut next = o.clone();
            match o.kind {
                ObstacleKind::StaticUncertain => {
                    next.radius = normal(rng, o.nominal_radius, o.radius_uncertainty).max(min_radius);
                }
                ObstacleKind::Buoyant => {
                    let coupling = normal(rng, T::zero(), dynamics.coupling_sigma).abs();
                    let drift = field.velocity_or_zero(o.center);
                    let dt = dynamics.step_seconds;
                    let nx = normal(rng, T::zero(), o.noise_sigma);
                    let ny = normal(rng, T::zero(), o.noise_sigma);
                    next.center = Vec3::new(
                        o.center.x + (coupling * drift.x + o.velocity.x) * dt + nx,
                        o.center.y + (coupling * drift.y + o.velocity.y) * dt + ny,
                        o.center.z,
                    );
                    let (b1, b2, b3) = o.radius_gain;
                    let x = normal(rng, T::zero(), o.noise_sigma);
                    next.radius = (b1 * o.radius + b2 * x + b3 * o.radius_uncertainty).max(min_radius);
                }
            }
            next
        })
        .collect()
}
