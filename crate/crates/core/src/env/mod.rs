//! Simulated operating environment: traversability map, current field and
//! obstacles, advanced one immutable snapshot at a time.

pub mod current;
pub mod grid;
pub mod kmeans;
pub mod obstacles;

use std::io::{Read, Write};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use current::{CurrentConfig, CurrentField, CurrentNoise, Vortex};
pub use grid::{CellClass, IntensityGrid, Island, Raster, SyntheticMap, TraversabilityGrid};
pub use kmeans::{classify_grid, cluster_map, ClusterModel, KMeansConfig, UncertainBand};
pub use obstacles::{
    collision_boundary, evolve_obstacles, spawn_obstacles, BoundaryModel, Obstacle, ObstacleDynamics,
    ObstacleKind, ObstacleSpec,
};

use crate::error::Result;
use crate::geometry::{Aabb, Vec3};
use crate::scalar::Real;

/// Time-varying part of the environment; this is what snapshot files hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicState<T> {
    pub step: u64,
    pub current: CurrentField<T>,
    pub obstacles: Vec<Obstacle<T>>,
    pub boundary: BoundaryModel<T>,
    pub dynamics: ObstacleDynamics<T>,
    pub min_obstacle_radius: T,
}

impl<T: Real> DynamicState<T> {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }
}

/// Immutable environment snapshot. The grid is shared between snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment<T> {
    pub grid: Arc<TraversabilityGrid<T>>,
    pub state: DynamicState<T>,
}

impl<T: Real> Environment<T> {
    pub fn new(grid: Arc<TraversabilityGrid<T>>, current: CurrentField<T>) -> Self {
        Self {
            grid,
            state: DynamicState {
                step: 0,
                current,
                obstacles: Vec::new(),
                boundary: BoundaryModel::default(),
                dynamics: ObstacleDynamics::default(),
                min_obstacle_radius: T::one(),
            },
        }
    }

    /// Open water without current or obstacles.
    pub fn calm(grid: Arc<TraversabilityGrid<T>>, depth: T) -> Self {
        let bounds = grid.volume(depth);
        Self::new(grid, CurrentField::calm(bounds))
    }

    pub fn step(&self) -> u64 {
        self.state.step
    }

    pub fn current(&self) -> &CurrentField<T> {
        &self.state.current
    }

    pub fn obstacles(&self) -> &[Obstacle<T>] {
        &self.state.obstacles
    }

    /// Operating volume: the map extent over the current field's depth range.
    pub fn bounds(&self) -> Aabb<T> {
        let (ex, ey) = self.grid.extent();
        let cb = self.state.current.bounds;
        Aabb {
            min: Vec3::new(T::zero(), T::zero(), cb.min.z),
            max: Vec3::new(ex, ey, cb.max.z),
        }
    }

    pub fn with_obstacles(&self, obstacles: Vec<Obstacle<T>>) -> Self {
        let mut next = self.clone();
        next.state.obstacles = obstacles;
        next
    }

    /// Adds freshly spawned obstacles between `a` and `b`.
    pub fn spawn<R: Rng + ?Sized>(&self, spec: &ObstacleSpec<T>, a: Vec3<T>, b: Vec3<T>, rng: &mut R) -> Result<Self> {
        let fresh = spawn_obstacles(spec, a, b, self.state.step, &self.state.boundary, rng)?;
        let mut next = self.clone();
        next.state.obstacles.extend(fresh);
        Ok(next)
    }

    /// Effective collision radius of an obstacle at the current step.
    pub fn boundary_of(&self, o: &Obstacle<T>) -> T {
        collision_boundary(o, self.state.step.saturating_sub(o.spawn_step), &self.state.boundary)
    }

    /// Next snapshot: the current evolves first, then obstacles react to it.
    pub fn evolve<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let current = self.state.current.evolve(rng);
        let obstacles = evolve_obstacles(
            &self.state.obstacles,
            &current,
            &self.state.dynamics,
            self.state.min_obstacle_radius,
            rng,
        );
        Self {
            grid: Arc::clone(&self.grid),
            state: DynamicState {
                step: self.state.step + 1,
                current,
                obstacles,
                ..self.state.clone()
            },
        }
    }
}
