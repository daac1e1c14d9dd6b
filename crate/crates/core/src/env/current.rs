//! Layered 3-D current field built from regularized Lamb–Oseen vortices.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};
use crate::scalar::{normal, uniform, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vortex<T> {
    pub x: T,
    pub y: T,
    /// Circulation in m^2/s; positive turns counter-clockwise.
    pub strength: T,
    /// Core radius in meters, always positive.
    pub radius: T,
    /// Vertical scale of the Gaussian upwelling term.
    pub gamma: T,
}

impl<T: Real> Vortex<T> {
    /// Horizontal velocity `(u, v)` induced at the planar point.
    ///
    /// Tangential speed is `strength / (2 pi r) * (1 - exp(-r^2 / radius^2))`,
    /// which tends to zero at the core.
    pub fn horizontal(&self, x: T, y: T) -> (T, T) {
        let dx = x - self.x;
        let dy = y - self.y;
        let r2 = dx * dx + dy * dy;
        let two_pi = T::two() * T::PI();
        let l2 = self.radius * self.radius;
        // v_theta / r
        let factor = if r2 == T::zero() {
            self.strength / (two_pi * l2)
        } else {
            -self.strength * (-r2 / l2).exp_m1() / (two_pi * r2)
        };
        (-factor * dy, factor * dx)
    }

    /// Gaussian vertical component with covariance `diag(radius, radius)`.
    pub fn vertical(&self, x: T, y: T) -> T {
        let dx = x - self.x;
        let dy = y - self.y;
        let r2 = dx * dx + dy * dy;
        let two_pi = T::two() * T::PI();
        self.gamma * self.strength * (-r2 / (T::two() * self.radius)).exp() / (two_pi * self.radius)
    }
}

/// Standard deviations of the per-step random walk applied to each vortex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentNoise<T> {
    pub center_x: T,
    pub center_y: T,
    pub radius: T,
    pub strength: T,
}

impl<T: Real> CurrentNoise<T> {
    pub fn zero() -> Self {
        Self { center_x: T::zero(), center_y: T::zero(), radius: T::zero(), strength: T::zero() }
    }

    pub fn uniform(sigma: T) -> Self {
        Self { center_x: sigma, center_y: sigma, radius: sigma, strength: sigma }
    }
}

/// Parameters for drawing a fresh field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentConfig<T> {
    pub vortices_min: usize,
    pub vortices_max: usize,
    /// Absolute circulation range; the sign is drawn separately.
    pub strength_range: (T, T),
    pub radius_range: (T, T),
    pub gamma: T,
    pub depth: T,
    pub layer_spacing: T,
    pub update_rate: T,
    pub noise: CurrentNoise<T>,
    /// Lower clamp for the core radius after noise.
    pub min_radius: T,
}

impl<T: Real> Default for CurrentConfig<T> {
    fn default() -> Self {
        Self {
            vortices_min: 5,
            vortices_max: 8,
            strength_range: (T::of(30.0), T::of(120.0)),
            radius_range: (T::of(150.0), T::of(400.0)),
            gamma: T::of(0.01),
            depth: T::of(100.0),
            layer_spacing: T::of(10.0),
            update_rate: T::of(4.0),
            noise: CurrentNoise {
                center_x: T::of(0.7),
                center_y: T::of(0.7),
                radius: T::of(0.15),
                strength: T::of(0.15),
            },
            min_radius: T::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentField<T> {
    /// Vortex set per layer, shallowest first.
    pub layers: Vec<Vec<Vortex<T>>>,
    pub layer_depths: Vec<T>,
    /// Planar extent and depth range of the field.
    pub bounds: Aabb<T>,
    pub update_rate: T,
    pub noise: CurrentNoise<T>,
    pub min_radius: T,
    pub step: u64,
}

impl<T: Real> CurrentField<T> {
    /// Field with no vortices; every query returns zero.
    pub fn calm(bounds: Aabb<T>) -> Self {
        Self {
            layers: vec![Vec::new()],
            layer_depths: vec![bounds.min.z],
            bounds,
            update_rate: T::zero(),
            noise: CurrentNoise::zero(),
            min_radius: T::one(),
            step: 0,
        }
    }

    /// Field whose every layer holds the same vortices.
    pub fn uniform_layers(bounds: Aabb<T>, layer_spacing: T, vortices: Vec<Vortex<T>>) -> Self {
        let depths = layer_depths(bounds.min.z, bounds.max.z, layer_spacing);
        Self {
            layers: vec![vortices; depths.len()],
            layer_depths: depths,
            bounds,
            update_rate: T::zero(),
            noise: CurrentNoise::zero(),
            min_radius: T::one(),
            step: 0,
        }
    }

    /// Draws the surface layer, then derives each deeper layer from the one
    /// above with one noise application.
    pub fn generate<R: Rng + ?Sized>(cfg: &CurrentConfig<T>, extent: (T, T), rng: &mut R) -> Result<Self> {
        if cfg.vortices_min > cfg.vortices_max {
            return Err(Error::Config("vortices_min exceeds vortices_max".into()));
        }
        if !(cfg.layer_spacing > T::zero() && cfg.depth >= T::zero()) {
            return Err(Error::Config("layer spacing must be positive".into()));
        }
        if !(cfg.radius_range.0 > T::zero() && cfg.radius_range.1 >= cfg.radius_range.0) {
            return Err(Error::Config("vortex radius range must be positive".into()));
        }
        let bounds = Aabb {
            min: Vec3::zero(),
            max: Vec3::new(extent.0, extent.1, cfg.depth),
        };
        let count = rng.gen_range(cfg.vortices_min..=cfg.vortices_max);
        let surface: Vec<Vortex<T>> = (0..count)
            .map(|_| {
                let magnitude = uniform(rng, cfg.strength_range.0, cfg.strength_range.1);
                let sign = if rng.gen::<bool>() { T::one() } else { -T::one() };
                Vortex {
                    x: uniform(rng, T::zero(), extent.0),
                    y: uniform(rng, T::zero(), extent.1),
                    strength: sign * magnitude,
                    radius: uniform(rng, cfg.radius_range.0, cfg.radius_range.1),
                    gamma: cfg.gamma,
                }
            })
            .collect();
        let depths = layer_depths(T::zero(), cfg.depth, cfg.layer_spacing);
        let mut field = Self {
            layers: Vec::with_capacity(depths.len()),
            layer_depths: depths,
            bounds,
            update_rate: cfg.update_rate,
            noise: cfg.noise,
            min_radius: cfg.min_radius,
            step: 0,
        };
        let mut layer = surface;
        for _ in 0..field.layer_depths.len() {
            let next = layer.iter().map(|v| field.perturb(v, rng)).collect();
            field.layers.push(std::mem::replace(&mut layer, next));
        }
        Ok(field)
    }

    fn perturb<R: Rng + ?Sized>(&self, v: &Vortex<T>, rng: &mut R) -> Vortex<T> {
        let u = self.update_rate;
        let n = &self.noise;
        let dx = normal(rng, T::zero(), n.center_x);
        let dy = normal(rng, T::zero(), n.center_y);
        let dl = normal(rng, T::zero(), n.radius);
        let ds = normal(rng, T::zero(), n.strength);
        Vortex {
            x: v.x + u * dx,
            y: v.y + u * dy,
            radius: (v.radius + u * dl).max(self.min_radius),
            strength: v.strength + u * ds,
            gamma: v.gamma,
        }
    }

    /// One recursive noise step on every vortex of every layer.
    pub fn evolve<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let layers = self
            .layers
            .iter()
            .map(|layer| layer.iter().map(|v| self.perturb(v, rng)).collect())
            .collect();
        Self { layers, step: self.step + 1, ..self.clone() }
    }

    /// Current velocity at a point inside the field bounds.
    pub fn velocity_at(&self, p: Vec3<T>) -> Result<Vec3<T>> {
        if !self.bounds.contains(p) {
            return Err(Error::OutOfBounds { x: p.x.as_f64(), y: p.y.as_f64(), z: p.z.as_f64() });
        }
        Ok(self.velocity_unchecked(p))
    }

    /// Like [`velocity_at`](Self::velocity_at) but zero outside the bounds.
    pub fn velocity_or_zero(&self, p: Vec3<T>) -> Vec3<T> {
        if self.bounds.contains(p) {
            self.velocity_unchecked(p)
        } else {
            Vec3::zero()
        }
    }

    fn velocity_unchecked(&self, p: Vec3<T>) -> Vec3<T> {
        let (lo, hi, s) = self.bracket(p.z);
        let a = layer_velocity(&self.layers[lo], p.x, p.y);
        if lo == hi || s == T::zero() {
            return a;
        }
        let b = layer_velocity(&self.layers[hi], p.x, p.y);
        a.lerp(b, s)
    }

    /// Bracketing layer indices and the interpolation weight of the deeper one.
    fn bracket(&self, z: T) -> (usize, usize, T) {
        let d = &self.layer_depths;
        if d.len() == 1 || z <= d[0] {
            return (0, 0, T::zero());
        }
        let last = d.len() - 1;
        if z >= d[last] {
            return (last, last, T::zero());
        }
        let hi = d.partition_point(|&x| x <= z);
        let lo = hi - 1;
        (lo, hi, (z - d[lo]) / (d[hi] - d[lo]))
    }

    pub fn vortex_count(&self) -> usize {
        self.layers.first().map_or(0, Vec::len)
    }
}

fn layer_velocity<T: Real>(layer: &[Vortex<T>], x: T, y: T) -> Vec3<T> {
    let mut out = Vec3::zero();
    for v in layer {
        let (u, w) = v.horizontal(x, y);
        out.x = out.x + u;
        out.y = out.y + w;
        out.z = out.z + v.vertical(x, y);
    }
    out
}

fn layer_depths<T: Real>(top: T, bottom: T, spacing: T) -> Vec<T> {
    let n = ((bottom - top) / spacing).floor().to_usize().unwrap_or(0);
    let mut depths: Vec<T> = (0..=n).map(|i| top + spacing * T::of_usize(i)).collect();
    if *depths.last().expect("at least one layer") < bottom {
        depths.push(bottom);
    }
    depths
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_vortex() -> Vortex<f64> {
        Vortex { x: 0.0, y: 0.0, strength: 2.0 * std::f64::consts::PI, radius: 1.0, gamma: 0.5 }
    }

    #[test]
    fn core_is_still() {
        assert_eq!(unit_vortex().horizontal(0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn tangential_speed_at_unit_radius() {
        let (u, v) = unit_vortex().horizontal(1.0, 0.0);
        assert!(u.abs() < 1e-15);
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn vertical_peak() {
        let v = unit_vortex();
        let expected = v.gamma * v.strength / (2.0 * std::f64::consts::PI * v.radius);
        assert!((v.vertical(0.0, 0.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn default_layering_has_eleven_layers() {
        let cfg = CurrentConfig::<f64>::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = CurrentField::generate(&cfg, (3500.0, 3500.0), &mut rng).unwrap();
        assert_eq!(f.layer_depths.len(), 11);
        assert_eq!(f.layer_depths[10], 100.0);
        assert!((5..=8).contains(&f.vortex_count()));
        assert!(f.layers.iter().all(|l| l.len() == f.vortex_count()));
    }

    #[test]
    fn depth_interpolation_is_linear_between_layers() {
        let bounds = Aabb { min: Vec3::zero(), max: Vec3::new(100.0, 100.0, 20.0) };
        let mut f = CurrentField::uniform_layers(bounds, 10.0, vec![unit_vortex()]);
        f.layers[1][0].strength *= 3.0;
        let p = |z| Vec3::new(1.0, 0.0, z);
        let a = f.velocity_at(p(0.0)).unwrap();
        let b = f.velocity_at(p(10.0)).unwrap();
        let mid = f.velocity_at(p(2.5)).unwrap();
        assert!((mid.y - (0.75 * a.y + 0.25 * b.y)).abs() < 1e-12);
        assert!(f.velocity_at(p(21.0)).is_err());
    }

    #[test]
    fn zero_noise_evolution_only_ticks() {
        let mut cfg = CurrentConfig::<f64>::default();
        cfg.noise = CurrentNoise::zero();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = CurrentField::generate(&cfg, (1000.0, 1000.0), &mut rng).unwrap();
        let g = f.evolve(&mut rng);
        assert_eq!(g.layers, f.layers);
        assert_eq!(g.step, 1);
    }
}
