use serde::{Deserialize, Serialize};

use super::VehicleLimits;
use crate::env::CurrentField;
use crate::geometry::{wrap_angle, Vec3};
use crate::scalar::Real;

/// Vehicle state at one path sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathState<T> {
    /// Seconds since the path start.
    pub t: T,
    pub position: Vec3<T>,
    /// Heading from +x towards +y, radians.
    pub heading: T,
    /// Pitch, positive when climbing (depth decreasing), radians.
    pub pitch: T,
    /// Water-referenced velocity plus the local current, per axis.
    pub u: T,
    pub v: T,
    pub w: T,
    pub current: Vec3<T>,
    /// Heading change rate into this sample, rad/s.
    pub yaw_rate: T,
}

impl<T: Real> PathState<T> {
    /// Velocity component along the heading.
    pub fn surge(&self) -> T {
        self.u * self.heading.cos() + self.v * self.heading.sin()
    }

    /// Velocity component across the heading, positive to port.
    pub fn sway(&self) -> T {
        -self.u * self.heading.sin() + self.v * self.heading.cos()
    }
}

/// Heading and pitch of the direction `d`.
pub fn attitude<T: Real>(d: Vec3<T>) -> (T, T) {
    (d.y.atan2(d.x), (-d.z).atan2(d.horizontal_norm()))
}

/// States along a polyline. Each sample takes the attitude of the segment
/// leaving it (the last sample keeps the final segment's), velocities add the
/// local current to the water-referenced speed, and time advances by segment
/// length over speed. Coincident consecutive samples are collapsed.
pub fn path_kinematics<T: Real>(
    positions: &[Vec3<T>],
    field: &CurrentField<T>,
    limits: &VehicleLimits<T>,
    t0: T,
) -> Vec<PathState<T>> {
    let mut pts: Vec<Vec3<T>> = Vec::with_capacity(positions.len());
    for &p in positions {
        if pts.last().map_or(true, |&q| q != p) {
            pts.push(p);
        }
    }
    let speed = limits.speed;
    let mut out = Vec::with_capacity(pts.len());
    let mut t = t0;
    let mut prev: Option<(T, T)> = None;
    for i in 0..pts.len() {
        let (heading, pitch) = if i + 1 < pts.len() {
            attitude(pts[i + 1] - pts[i])
        } else if i > 0 {
            attitude(pts[i] - pts[i - 1])
        } else {
            (T::zero(), T::zero())
        };
        if i > 0 {
            t = t + pts[i].distance(pts[i - 1]) / speed;
        }
        let yaw_rate = match prev {
            Some((h, tp)) if t > tp => wrap_angle(heading - h) / (t - tp),
            _ => T::zero(),
        };
        let c = field.velocity_or_zero(pts[i]);
        let horizontal = speed * pitch.cos();
        out.push(PathState {
            t,
            position: pts[i],
            heading,
            pitch,
            u: horizontal * heading.cos() + c.x,
            v: horizontal * heading.sin() + c.y,
            w: speed * pitch.sin(),
            current: c,
            yaw_rate,
        });
        prev = Some((heading, t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Aabb;

    fn calm() -> CurrentField<f64> {
        CurrentField::calm(Aabb { min: Vec3::zero(), max: Vec3::new(1e4, 1e4, 100.0) })
    }

    #[test]
    fn level_run_along_x() {
        let l = VehicleLimits::default();
        let s = path_kinematics(&[Vec3::new(0.0, 0.0, 10.0), Vec3::new(100.0, 0.0, 10.0)], &calm(), &l, 0.0);
        assert_eq!((s[0].heading, s[0].pitch), (0.0, 0.0));
        assert_eq!((s[0].u, s[0].v, s[0].w), (2.5, 0.0, 0.0));
        assert_eq!(s[1].t, 40.0);
    }

    #[test]
    fn pure_descent_points_down() {
        let l = VehicleLimits::default();
        let s = path_kinematics(&[Vec3::new(5.0, 5.0, 10.0), Vec3::new(5.0, 5.0, 60.0)], &calm(), &l, 0.0);
        assert!((s[0].pitch + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((s[0].w - 2.5 * s[0].pitch.sin()).abs() < 1e-15);
    }

    #[test]
    fn duplicates_collapse() {
        let l = VehicleLimits::default();
        let p = Vec3::new(1.0, 1.0, 1.0);
        let s = path_kinematics(&[p, p, Vec3::new(2.0, 1.0, 1.0)], &calm(), &l, 0.0);
        assert_eq!(s.len(), 2);
    }
}
