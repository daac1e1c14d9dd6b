use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{clamp_to_bounds, Population, Problem};
use crate::error::{Error, Result};
use crate::scalar::{uniform, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoParams<T> {
    pub c1: T,
    pub c2: T,
    /// Inertia at the first and last iteration, interpolated linearly.
    pub inertia: (T, T),
    /// Velocity bound as a fraction of each dimension's width.
    pub velocity_fraction: T,
}

impl<T: Real> PsoParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.c1 < T::zero() || self.c2 < T::zero() {
            return Err(Error::Config("acceleration coefficients must be non-negative".into()));
        }
        if !(self.velocity_fraction > T::zero()) {
            return Err(Error::Config("velocity fraction must be positive".into()));
        }
        Ok(())
    }

    /// Inertia weight at iteration `t` of `t_max` (1-based).
    pub fn inertia_at(&self, t: usize, t_max: usize) -> T {
        if t_max == 0 {
            return self.inertia.0;
        }
        let s = T::of_usize(t.min(t_max)) / T::of_usize(t_max);
        self.inertia.0 + (self.inertia.1 - self.inertia.0) * s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Swarm<T> {
    pub positions: Vec<Vec<T>>,
    pub velocities: Vec<Vec<T>>,
    pub costs: Vec<T>,
    pub personal_best: Vec<Vec<T>>,
    pub personal_cost: Vec<T>,
    /// Index into the personal bests.
    pub global: usize,
    pub velocity_limit: Vec<T>,
}

impl<T: Real> Swarm<T> {
    /// Swarm at the given positions with random velocities inside the limits.
    pub fn new<R: Rng + ?Sized>(pop: Population<T>, bounds: &[(T, T)], params: &PsoParams<T>, rng: &mut R) -> Self {
        let velocity_limit: Vec<T> = bounds.iter().map(|&(lo, hi)| (hi - lo) * params.velocity_fraction).collect();
        let velocities = pop
            .members
            .iter()
            .map(|_| velocity_limit.iter().map(|&v| uniform(rng, -v, v)).collect())
            .collect();
        let global = pop.best_index();
        Self {
            personal_best: pop.members.clone(),
            personal_cost: pop.costs.clone(),
            positions: pop.members,
            velocities,
            costs: pop.costs,
            global,
            velocity_limit,
        }
    }

    pub fn best_position(&self) -> &[T] {
        &self.personal_best[self.global]
    }

    pub fn best_cost(&self) -> T {
        self.personal_cost[self.global]
    }

    fn refresh_global(&mut self) {
        let mut g = self.global;
        for i in 0..self.personal_cost.len() {
            if self.personal_cost[i] < self.personal_cost[g] {
                g = i;
            }
        }
        self.global = g;
    }
}

/// One velocity/position update at iteration `t`. Personal bests move only
/// on strict improvement. Returns the number of cost evaluations.
pub fn pso_step<T: Real, P: Problem<T> + ?Sized, R: Rng + ?Sized>(
    swarm: &mut Swarm<T>,
    params: &PsoParams<T>,
    t: usize,
    t_max: usize,
    problem: &P,
    rng: &mut R,
) -> usize {
    let bounds = problem.bounds();
    let w = params.inertia_at(t, t_max);
    let g = swarm.personal_best[swarm.global].clone();
    for i in 0..swarm.positions.len() {
        for j in 0..bounds.len() {
            let r1: f64 = rng.gen();
            let r2: f64 = rng.gen();
            let x = swarm.positions[i][j];
            let lim = swarm.velocity_limit[j];
            let v = w * swarm.velocities[i][j]
                + params.c1 * T::of(r1) * (swarm.personal_best[i][j] - x)
                + params.c2 * T::of(r2) * (g[j] - x);
            let v = v.max(-lim).min(lim);
            swarm.velocities[i][j] = v;
            swarm.positions[i][j] = x + v;
        }
        clamp_to_bounds(&mut swarm.positions[i], bounds);
        let c = problem.cost(&swarm.positions[i]);
        swarm.costs[i] = c;
        if c < swarm.personal_cost[i] {
            swarm.personal_cost[i] = c;
            swarm.personal_best[i] = swarm.positions[i].clone();
        }
    }
    swarm.refresh_global();
    swarm.positions.len()
}
