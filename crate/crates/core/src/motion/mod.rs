//! Spline trajectories between consecutive waypoints, costed against the
//! current environment snapshot and refined online.

mod kinematics;
mod planner;
mod spline;
mod violations;

use serde::{Deserialize, Serialize};

pub use kinematics::{attitude, path_kinematics, PathState};
pub use planner::{
    path_cost, plan_path, replan_path, MotionConfig, MotionProblem, PathSolution, Replanned,
};
pub use spline::{open_uniform_knots, polyline_length, spline_path, SplineSampler};
pub use violations::{path_violations, state_collides, Violations};

use crate::scalar::Real;

/// Violation weights, one per component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalties<T> {
    pub depth_min: T,
    pub depth_max: T,
    pub surge: T,
    pub sway: T,
    pub yaw_rate: T,
    pub collision: T,
}

impl<T: Real> Penalties<T> {
    pub fn as_array(&self) -> [T; 6] {
        [self.depth_min, self.depth_max, self.surge, self.sway, self.yaw_rate, self.collision]
    }
}

impl<T: Real> Default for Penalties<T> {
    fn default() -> Self {
        Self {
            depth_min: T::of(10.0),
            depth_max: T::of(10.0),
            surge: T::of(5.0),
            sway: T::of(5.0),
            yaw_rate: T::of(5.0),
            collision: T::of(1000.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleLimits<T> {
    /// Water-referenced cruise speed, m/s.
    pub speed: T,
    pub surge_max: T,
    /// `(min, max)` sway velocity, m/s.
    pub sway: (T, T),
    /// `(min, max)` yaw rate, degrees per second.
    pub yaw_rate_deg: (T, T),
    pub pitch_max_deg: T,
    /// `(min, max)` depth, meters.
    pub depth: (T, T),
    pub penalty: Penalties<T>,
    /// Per-component multipliers applied on top of the penalties.
    pub q: [T; 6],
}

impl<T: Real> Default for VehicleLimits<T> {
    fn default() -> Self {
        Self {
            speed: T::of(2.5),
            surge_max: T::of(2.7),
            sway: (T::of(-0.5), T::half()),
            yaw_rate_deg: (T::of(-17.0), T::of(17.0)),
            pitch_max_deg: T::of(45.0),
            depth: (T::zero(), T::of(100.0)),
            penalty: Penalties::default(),
            q: [T::one(); 6],
        }
    }
}

impl<T: Real> VehicleLimits<T> {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.speed > T::zero()
            && self.depth.0 < self.depth.1
            && self.sway.0 < self.sway.1
            && self.yaw_rate_deg.0 < self.yaw_rate_deg.1
            && self.penalty.as_array().iter().all(|&p| p >= T::zero())
            && self.q.iter().all(|&q| q >= T::zero());
        if ok {
            Ok(())
        } else {
            Err(crate::Error::Config("inconsistent vehicle limits".into()))
        }
    }

    /// Pitch bound check; pitch is reported but not penalized.
    pub fn pitch_ok(&self, s: &PathState<T>) -> bool {
        s.pitch.abs() <= self.pitch_max_deg.to_radians()
    }
}
