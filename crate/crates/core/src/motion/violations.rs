use serde::{Deserialize, Serialize};

use super::kinematics::PathState;
use super::VehicleLimits;
use crate::env::Environment;
use crate::scalar::Real;

/// Unweighted violation components. Continuous terms are summed clamped
/// excesses over all samples; `collision` is 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Violations<T> {
    pub depth_min: T,
    pub depth_max: T,
    pub surge: T,
    pub sway: T,
    pub yaw_rate: T,
    pub collision: T,
}

impl<T: Real> Violations<T> {
    pub fn zero() -> Self {
        Self {
            depth_min: T::zero(),
            depth_max: T::zero(),
            surge: T::zero(),
            sway: T::zero(),
            yaw_rate: T::zero(),
            collision: T::zero(),
        }
    }

    pub fn as_array(&self) -> [T; 6] {
        [self.depth_min, self.depth_max, self.surge, self.sway, self.yaw_rate, self.collision]
    }

    pub fn is_clear(&self) -> bool {
        self.as_array().iter().all(|&v| v == T::zero())
    }

    /// `sum_i Q_i Phi_i Lambda_i`.
    pub fn weighted(&self, limits: &VehicleLimits<T>) -> T {
        let phi = limits.penalty.as_array();
        self.as_array()
            .iter()
            .zip(phi)
            .zip(limits.q)
            .map(|((&l, p), q)| q * p * l)
            .sum()
    }
}

fn excess<T: Real>(value: T, lo: T, hi: T) -> T {
    (lo - value).max(T::zero()) + (value - hi).max(T::zero())
}

/// True when the state sits on coast, off the map or inside an obstacle's
/// current collision boundary.
pub fn state_collides<T: Real>(s: &PathState<T>, env: &Environment<T>) -> bool {
    let p = s.position;
    env.grid.is_forbidden(p.x, p.y) || env.obstacles().iter().any(|o| p.distance(o.center) < env.boundary_of(o))
}

pub fn path_violations<T: Real>(states: &[PathState<T>], env: &Environment<T>, limits: &VehicleLimits<T>) -> Violations<T> {
    let yaw_lo = limits.yaw_rate_deg.0.to_radians();
    let yaw_hi = limits.yaw_rate_deg.1.to_radians();
    let mut v = Violations::zero();
    let mut hit = false;
    for s in states {
        v.depth_min = v.depth_min + (limits.depth.0 - s.position.z).max(T::zero());
        v.depth_max = v.depth_max + (s.position.z - limits.depth.1).max(T::zero());
        v.surge = v.surge + (s.surge() - limits.surge_max).max(T::zero());
        v.sway = v.sway + excess(s.sway(), limits.sway.0, limits.sway.1);
        v.yaw_rate = v.yaw_rate + excess(s.yaw_rate, yaw_lo, yaw_hi);
        if !hit && state_collides(s, env) {
            hit = true;
        }
    }
    if hit {
        v.collision = T::one();
    }
    v
}
