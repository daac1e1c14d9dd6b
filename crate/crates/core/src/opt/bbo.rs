use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Population, Problem};
use crate::error::{Error, Result};
use crate::scalar::{uniform, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BboParams<T> {
    /// Maximum immigration rate.
    pub immigration: T,
    /// Maximum emigration rate.
    pub emigration: T,
    pub mutation_max: T,
    /// Best habitats copied unchanged into the next generation.
    pub elites: usize,
    /// Time step of the one-step species probability update.
    pub species_dt: T,
}

impl<T: Real> BboParams<T> {
    pub fn validate(&self, population: usize) -> Result<()> {
        if !(self.immigration > T::zero() && self.emigration > T::zero()) {
            return Err(Error::Config("migration rates must be positive".into()));
        }
        if !(self.mutation_max >= T::zero() && self.mutation_max <= T::one()) {
            return Err(Error::Config("maximum mutation rate must lie in [0, 1]".into()));
        }
        if self.elites >= population {
            return Err(Error::Config("elite count must be below the population size".into()));
        }
        if self.species_dt < T::zero() {
            return Err(Error::Config("species time step must be non-negative".into()));
        }
        Ok(())
    }

    /// Immigration and emigration rates for species count `s` of `s_max`.
    pub fn rates(&self, s: usize, s_max: usize) -> (T, T) {
        let frac = if s_max == 0 { T::one() } else { T::of_usize(s) / T::of_usize(s_max) };
        (self.immigration * (T::one() - frac), self.emigration * frac)
    }
}

/// Per-species-count mutation rates `m_max (1 - P_S) / P_max`, where `P_S`
/// starts as the normalized rank `S / S_max` and receives one step of the
/// birth-death probability update before being rescaled to a unit maximum.
/// Rates are clamped to `[0, 1]`.
pub fn mutation_rates<T: Real>(params: &BboParams<T>, s_max: usize) -> Vec<T> {
    let n = s_max + 1;
    let p0: Vec<T> = (0..n)
        .map(|s| if s_max == 0 { T::one() } else { T::of_usize(s) / T::of_usize(s_max) })
        .collect();
    let dt = params.species_dt;
    let mut p1 = vec![T::zero(); n];
    for s in 0..n {
        let (lam, mu) = params.rates(s, s_max);
        let mut v = p0[s] * (T::one() - lam * dt - mu * dt);
        if s > 0 {
            v = v + p0[s - 1] * params.rates(s - 1, s_max).0 * dt;
        }
        if s + 1 < n {
            v = v + p0[s + 1] * params.rates(s + 1, s_max).1 * dt;
        }
        p1[s] = v.max(T::zero());
    }
    let peak = p1.iter().copied().fold(T::zero(), T::max);
    let p: Vec<T> = if peak > T::zero() { p1.iter().map(|&v| v / peak).collect() } else { p0 };
    let p_max = p.iter().copied().fold(T::zero(), T::max);
    p.iter()
        .map(|&ps| (params.mutation_max * (T::one() - ps) / p_max).max(T::zero()).min(T::one()))
        .collect()
}

/// Roulette pick proportional to `weights`, skipping `exclude`.
fn roulette<T: Real, R: Rng + ?Sized>(weights: &[T], exclude: usize, rng: &mut R) -> usize {
    let total: T = weights.iter().enumerate().filter(|&(i, _)| i != exclude).map(|(_, &w)| w).sum();
    if !(total > T::zero()) {
        return if exclude == 0 { 1.min(weights.len() - 1) } else { 0 };
    }
    let mut target = uniform(rng, T::zero(), total);
    let mut last = exclude;
    for (i, &w) in weights.iter().enumerate() {
        if i == exclude || w <= T::zero() {
            continue;
        }
        last = i;
        if target < w {
            return i;
        }
        target = target - w;
    }
    last
}

/// One generation in place. Habitats are ranked by cost; the elites pass
/// through, every other habitat migrates features from emigrating habitats
/// and is then mutated. Returns the number of cost evaluations.
pub fn bbo_step<T: Real, P: Problem<T> + ?Sized, R: Rng + ?Sized>(
    habitats: &mut Population<T>,
    params: &BboParams<T>,
    problem: &P,
    rng: &mut R,
) -> usize {
    let n = habitats.len();
    let bounds = problem.bounds();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        habitats.costs[a]
            .partial_cmp(&habitats.costs[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let members: Vec<Vec<T>> = order.iter().map(|&i| habitats.members[i].clone()).collect();
    let costs: Vec<T> = order.iter().map(|&i| habitats.costs[i]).collect();
    let s_max = n - 1;
    // rank r has species count s_max - r, so rank 0 holds the most species
    let rates: Vec<(T, T)> = (0..n).map(|r| params.rates(s_max - r, s_max)).collect();
    let emigration: Vec<T> = rates.iter().map(|r| r.1).collect();
    let mutation = mutation_rates(params, s_max);

    let mut next_members = members.clone();
    let mut next_costs = costs.clone();
    let mut evals = 0;
    for r in params.elites..n {
        let (lam, _) = rates[r];
        let x = &mut next_members[r];
        for j in 0..bounds.len() {
            let draw: f64 = rng.gen();
            if T::of(draw) < lam {
                let src = roulette(&emigration, r, rng);
                x[j] = members[src][j];
            }
        }
        let m = mutation[s_max - r];
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            let draw: f64 = rng.gen();
            if T::of(draw) < m {
                x[j] = uniform(rng, lo, hi);
            }
        }
        next_costs[r] = problem.cost(x);
        evals += 1;
    }
    habitats.members = next_members;
    habitats.costs = next_costs;
    evals
}
