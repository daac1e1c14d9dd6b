//! Population-based optimizers over a box-bounded continuous encoding.
//!
//! Every engine works on plain `Vec<T>` candidates; a [`Problem`] turns a
//! candidate into a cost, returning `+inf` for anything that does not decode.

mod bbo;
mod de;
mod pso;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use bbo::{bbo_step, mutation_rates, BboParams};
pub use de::{crossover, de_step, mutant, DeParams};
pub use pso::{pso_step, PsoParams, Swarm};

use crate::error::{Error, Result};
use crate::scalar::{approx_eq, uniform, Real};

pub trait Problem<T: Real> {
    type Solution;

    /// Inclusive `(lower, upper)` per dimension.
    fn bounds(&self) -> &[(T, T)];

    fn decode(&self, x: &[T]) -> Option<Self::Solution>;

    fn evaluate(&self, s: &Self::Solution) -> T;

    /// Cost of a raw candidate; `+inf` when it does not decode.
    fn cost(&self, x: &[T]) -> T {
        match self.decode(x) {
            Some(s) => self.evaluate(&s),
            None => T::infinity(),
        }
    }

    fn dimension(&self) -> usize {
        self.bounds().len()
    }
}

/// Closure-backed problem whose solution is the candidate itself.
pub struct FnProblem<T, F> {
    pub bounds: Vec<(T, T)>,
    pub f: F,
}

impl<T: Real, F: Fn(&[T]) -> T> Problem<T> for FnProblem<T, F> {
    type Solution = Vec<T>;

    fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    fn decode(&self, x: &[T]) -> Option<Vec<T>> {
        Some(x.to_vec())
    }

    fn evaluate(&self, s: &Vec<T>) -> T {
        (self.f)(s)
    }

    fn cost(&self, x: &[T]) -> T {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    De,
    Pso,
    Bbo,
}

impl EngineKind {
    pub const ALL: [EngineKind; 3] = [EngineKind::De, EngineKind::Pso, EngineKind::Bbo];
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::De => "de",
            EngineKind::Pso => "pso",
            EngineKind::Bbo => "bbo",
        })
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "de" => Ok(EngineKind::De),
            "pso" => Ok(EngineKind::Pso),
            "bbo" => Ok(EngineKind::Bbo),
            other => Err(Error::Config(format!("unknown engine `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig<T> {
    pub engine: EngineKind,
    pub population: usize,
    pub iterations: usize,
    /// Stop after this many consecutive iterations without relative
    /// improvement above `stall_tolerance`.
    pub stall_iterations: Option<usize>,
    pub stall_tolerance: T,
    /// Random redraws allowed per initial individual that fails to decode.
    pub init_retries: usize,
    pub de: DeParams<T>,
    pub pso: PsoParams<T>,
    pub bbo: BboParams<T>,
}

impl<T: Real> EngineConfig<T> {
    /// Settings used for routing over priority vectors.
    pub fn mission_default() -> Self {
        Self {
            engine: EngineKind::De,
            population: 70,
            iterations: 100,
            stall_iterations: Some(30),
            stall_tolerance: T::of(1e-6),
            init_retries: 50,
            de: DeParams { scale: (T::of(0.2), T::of(0.8)), crossover: T::of(0.2), donor_weights: None },
            pso: PsoParams {
                c1: T::of(1.5),
                c2: T::two(),
                inertia: (T::one(), T::zero()),
                velocity_fraction: T::of(0.2),
            },
            bbo: BboParams {
                immigration: T::of(0.8),
                emigration: T::of(0.2),
                mutation_max: T::half(),
                elites: 2,
                species_dt: T::of(0.1),
            },
        }
    }

    /// Settings used for spline control-point search.
    pub fn motion_default() -> Self {
        Self {
            engine: EngineKind::De,
            population: 120,
            iterations: 100,
            stall_iterations: Some(30),
            stall_tolerance: T::of(1e-6),
            init_retries: 50,
            de: DeParams { scale: (T::of(0.2), T::of(0.8)), crossover: T::of(0.4), donor_weights: None },
            pso: PsoParams {
                c1: T::of(1.8),
                c2: T::of(2.5),
                inertia: (T::of(1.5), T::half()),
                velocity_fraction: T::of(0.2),
            },
            bbo: BboParams {
                immigration: T::one(),
                emigration: T::one(),
                mutation_max: T::of(0.1),
                elites: 2,
                species_dt: T::of(0.1),
            },
        }
    }

    pub fn with_engine(mut self, engine: EngineKind) -> Self {
        self.engine = engine;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population == 0 {
            return Err(Error::Config("population must be positive".into()));
        }
        match self.engine {
            EngineKind::De => self.de.validate(self.population),
            EngineKind::Pso => self.pso.validate(),
            EngineKind::Bbo => self.bbo.validate(self.population),
        }
    }
}

/// Candidates and their costs, index-aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population<T> {
    pub members: Vec<Vec<T>>,
    pub costs: Vec<T>,
}

impl<T: Real> Population<T> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the lowest cost, first one on ties.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.costs.len() {
            if self.costs[i] < self.costs[best] {
                best = i;
            }
        }
        best
    }

    pub fn best_cost(&self) -> T {
        self.costs[self.best_index()]
    }
}

pub fn clamp_to_bounds<T: Real>(x: &mut [T], bounds: &[(T, T)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.max(lo).min(hi);
    }
}

pub fn random_point<T: Real, R: Rng + ?Sized>(bounds: &[(T, T)], rng: &mut R) -> Vec<T> {
    bounds.iter().map(|&(lo, hi)| uniform(rng, lo, hi)).collect()
}

/// Warm-start vectors first (clamped), then random draws, each redrawn up to
/// `retries` times while its cost is infinite.
pub fn initial_population<T: Real, P: Problem<T> + ?Sized, R: Rng + ?Sized>(
    problem: &P,
    size: usize,
    retries: usize,
    warm_start: &[Vec<T>],
    rng: &mut R,
) -> Result<(Population<T>, usize)> {
    let bounds = problem.bounds();
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo < hi) {
            return Err(Error::Config(format!("dimension {i} has empty bounds")));
        }
    }
    let mut members = Vec::with_capacity(size);
    let mut costs = Vec::with_capacity(size);
    let mut evals = 0;
    for w in warm_start.iter().take(size) {
        if w.len() != bounds.len() {
            return Err(Error::Config("warm-start vector has the wrong dimension".into()));
        }
        let mut x = w.clone();
        clamp_to_bounds(&mut x, bounds);
        costs.push(problem.cost(&x));
        evals += 1;
        members.push(x);
    }
    while members.len() < size {
        let mut x = random_point(bounds, rng);
        let mut c = problem.cost(&x);
        evals += 1;
        for _ in 0..retries {
            if c.is_finite() {
                break;
            }
            x = random_point(bounds, rng);
            c = problem.cost(&x);
            evals += 1;
        }
        members.push(x);
        costs.push(c);
    }
    if costs.iter().all(|c| !c.is_finite()) {
        return Err(Error::Initialization);
    }
    Ok((Population { members, costs }, evals))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow<T> {
    pub iteration: usize,
    /// All-time best cost after this iteration.
    pub best_cost: T,
    /// Cumulative cost evaluations.
    pub evals: usize,
    /// Wall-clock milliseconds since the run started.
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptTrace<T> {
    pub engine: EngineKind,
    /// Row 0 describes the initial population.
    pub rows: Vec<TraceRow<T>>,
    pub best: Vec<T>,
    pub evaluations: usize,
    pub wall_ms: f64,
}

impl<T: Real> OptTrace<T> {
    pub fn best_cost(&self) -> T {
        self.rows.last().map_or(T::infinity(), |r| r.best_cost)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iteration,best_cost,evals,elapsed_ms")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{:.3}", r.iteration, r.best_cost, r.evals, r.elapsed_ms)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum<T> {
    pub position: Vec<T>,
    pub cost: T,
    pub trace: OptTrace<T>,
}

/// Runs the configured engine and returns the all-time best candidate.
pub fn optimize<T: Real, P: Problem<T> + ?Sized, R: Rng + ?Sized>(
    cfg: &EngineConfig<T>,
    problem: &P,
    rng: &mut R,
    warm_start: &[Vec<T>],
) -> Result<Optimum<T>> {
    cfg.validate()?;
    let clock = Instant::now();
    let bounds = problem.bounds().to_vec();
    let (pop, mut evals) = initial_population(problem, cfg.population, cfg.init_retries, warm_start, rng)?;

    let mut best = pop.members[pop.best_index()].clone();
    let mut best_cost = pop.best_cost();
    let mut rows = vec![TraceRow { iteration: 0, best_cost, evals, elapsed_ms: ms(clock) }];

    let mut state = match cfg.engine {
        EngineKind::De | EngineKind::Bbo => EngineState::Population(pop),
        EngineKind::Pso => EngineState::Swarm(Swarm::new(pop, &bounds, &cfg.pso, rng)),
    };
    let mut stalled = 0;
    for t in 1..=cfg.iterations {
        let (step_best, step_cost, used) = match &mut state {
            EngineState::Population(p) => {
                let used = match cfg.engine {
                    EngineKind::De => de_step(p, &cfg.de, problem, rng),
                    _ => bbo_step(p, &cfg.bbo, problem, rng),
                };
                let i = p.best_index();
                (p.members[i].clone(), p.costs[i], used)
            }
            EngineState::Swarm(s) => {
                let used = pso_step(s, &cfg.pso, t, cfg.iterations, problem, rng);
                (s.best_position().to_vec(), s.best_cost(), used)
            }
        };
        evals += used;
        let previous = best_cost;
        if step_cost < best_cost {
            best_cost = step_cost;
            best = step_best;
        }
        rows.push(TraceRow { iteration: t, best_cost, evals, elapsed_ms: ms(clock) });
        if approx_eq(previous, best_cost, cfg.stall_tolerance) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        if cfg.stall_iterations.is_some_and(|limit| stalled >= limit) {
            break;
        }
    }
    let trace = OptTrace { engine: cfg.engine, rows, best: best.clone(), evaluations: evals, wall_ms: ms(clock) };
    Ok(Optimum { position: best, cost: best_cost, trace })
}

enum EngineState<T> {
    Population(Population<T>),
    Swarm(Swarm<T>),
}

fn ms(clock: Instant) -> f64 {
    clock.elapsed().as_secs_f64() * 1e3
}
