use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{clamp_to_bounds, Population, Problem};
use crate::error::{Error, Result};
use crate::scalar::{uniform, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeParams<T> {
    /// Scale factor drawn uniformly per individual from this range; equal
    /// endpoints give a fixed factor.
    pub scale: (T, T),
    pub crossover: T,
    /// Fixed donor mixing weights; drawn per individual when absent.
    pub donor_weights: Option<[T; 3]>,
}

impl<T: Real> DeParams<T> {
    pub fn validate(&self, population: usize) -> Result<()> {
        if population < 4 {
            return Err(Error::Config("differential evolution needs a population of at least 4".into()));
        }
        if !(self.crossover >= T::zero() && self.crossover <= T::one()) {
            return Err(Error::Config("crossover rate must lie in [0, 1]".into()));
        }
        if !(self.scale.0 >= T::zero() && self.scale.1 >= self.scale.0) {
            return Err(Error::Config("scale factor range must be non-negative and ordered".into()));
        }
        if let Some(w) = self.donor_weights {
            if w.iter().any(|&v| v < T::zero()) || w.iter().copied().sum::<T>() <= T::zero() {
                return Err(Error::Config("donor weights must be non-negative with a positive sum".into()));
            }
        }
        Ok(())
    }
}

/// Picks three distinct indices, all different from `i`.
fn triplet<R: Rng + ?Sized>(n: usize, i: usize, rng: &mut R) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    while k < 3 {
        let c = rng.gen_range(0..n);
        if c != i && !out[..k].contains(&c) {
            out[k] = c;
            k += 1;
        }
    }
    out
}

/// Mutant vector: the weighted donor of the triplet plus the scaled
/// difference of its first two members.
pub fn mutant<T: Real>(members: &[Vec<T>], r: [usize; 3], weights: [T; 3], f: T) -> Vec<T> {
    let total = weights[0] + weights[1] + weights[2];
    let w = weights.map(|v| v / total);
    let (a, b, c) = (&members[r[0]], &members[r[1]], &members[r[2]]);
    (0..a.len())
        .map(|j| w[0] * a[j] + w[1] * b[j] + w[2] * c[j] + f * (a[j] - b[j]))
        .collect()
}

/// Binomial crossover: mutant gene where `rand <= rate` or at `forced`.
pub fn crossover<T: Real, R: Rng + ?Sized>(parent: &[T], mutant: &[T], rate: T, forced: usize, rng: &mut R) -> Vec<T> {
    parent
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&p, &m))| {
            let draw: f64 = rng.gen();
            if j == forced || T::of(draw) <= rate && rate > T::zero() {
                m
            } else {
                p
            }
        })
        .collect()
}

/// One generation in place. Each parent is replaced by its mutant or its
/// trial vector, whichever is cheaper, when that is no worse than the parent.
/// Returns the number of cost evaluations.
pub fn de_step<T: Real, P: Problem<T> + ?Sized, R: Rng + ?Sized>(
    pop: &mut Population<T>,
    params: &DeParams<T>,
    problem: &P,
    rng: &mut R,
) -> usize {
    let n = pop.len();
    let bounds = problem.bounds();
    let forced = rng.gen_range(0..bounds.len());
    let snapshot = pop.members.clone();
    let mut evals = 0;
    for i in 0..n {
        let r = triplet(n, i, rng);
        let f = if params.scale.0 == params.scale.1 {
            params.scale.0
        } else {
            uniform(rng, params.scale.0, params.scale.1)
        };
        let weights = params
            .donor_weights
            .unwrap_or_else(|| [0; 3].map(|_| uniform(rng, T::of(1e-3), T::one())));
        let mut m = mutant(&snapshot, r, weights, f);
        clamp_to_bounds(&mut m, bounds);
        let trial = crossover(&snapshot[i], &m, params.crossover, forced, rng);
        let mc = problem.cost(&m);
        let tc = problem.cost(&trial);
        evals += 2;
        let (cand, cost) = if tc <= mc { (trial, tc) } else { (m, mc) };
        if cost <= pop.costs[i] {
            pop.members[i] = cand;
            pop.costs[i] = cost;
        }
    }
    evals
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_scale_base_only_mutant_is_third_member() {
        let members = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        assert_eq!(mutant(&members, [0, 1, 2], [0.0, 0.0, 1.0], 0.0), vec![5.0, 6.0]);
    }

    #[test]
    fn zero_rate_changes_only_forced_gene() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let parent = vec![0.0; 6];
        let m = vec![1.0; 6];
        let t = crossover(&parent, &m, 0.0, 4, &mut rng);
        assert_eq!(t, vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn small_population_is_rejected() {
        let p = DeParams { scale: (0.5, 0.5), crossover: 0.2, donor_weights: None };
        assert!(p.validate(3).is_err());
        assert!(p.validate(4).is_ok());
    }
}
