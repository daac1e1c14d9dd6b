//! Mission and motion layers as message-passing workers.
//!
//! Every job carries its own RNG seed drawn by the driver, so a job's result
//! does not depend on which thread runs it or when.

use std::collections::VecDeque;
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::Result;
use crate::geometry::Vec3;
use crate::graph::TaskGraph;
use crate::mission::{replan_mission, MissionBudget, MissionPlan};
use crate::motion::{plan_path, replan_path, MotionConfig, PathSolution, VehicleLimits};
use crate::opt::EngineConfig;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionMode {
    /// Jobs run inline on the driver thread in submission order.
    Deterministic,
    /// Each layer runs on its own thread; the driver exchanges jobs and
    /// results over channels.
    Threaded,
}

pub struct MissionJob<T> {
    /// Original graph; `passed` and `blocked` index its edges.
    pub graph: Arc<TaskGraph<T>>,
    pub passed: Vec<usize>,
    pub blocked: Vec<usize>,
    pub here: usize,
    pub budget: MissionBudget<T>,
    pub engine: EngineConfig<T>,
    pub seed: u64,
}

pub struct MissionDone<T> {
    pub result: Result<(TaskGraph<T>, MissionPlan<T>)>,
    pub elapsed: Duration,
}

pub fn mission_worker<T: Real>(job: MissionJob<T>) -> MissionDone<T> {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let result = replan_mission(&job.graph, &job.passed, &job.blocked, job.here, &job.budget, &job.engine, &mut rng)
        .map(|(g, plan, _)| (g, plan));
    MissionDone { result, elapsed: clock.elapsed() }
}

pub enum MotionRequest<T> {
    Plan { a: Vec3<T>, b: Vec3<T> },
    Replan { prev: PathSolution<T>, position: Vec3<T> },
}

pub struct MotionJob<T> {
    pub request: MotionRequest<T>,
    pub env: Environment<T>,
    pub limits: VehicleLimits<T>,
    pub cfg: MotionConfig<T>,
    pub seed: u64,
}

pub struct MotionDone<T> {
    pub result: Result<PathSolution<T>>,
    pub kept_previous: bool,
    pub elapsed: Duration,
}

pub fn motion_worker<T: Real>(job: MotionJob<T>) -> MotionDone<T> {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let (result, kept_previous) = match job.request {
        MotionRequest::Plan { a, b } => (
            plan_path(&job.env, a, b, &job.limits, &job.cfg, &mut rng, None).map(|(s, _)| s),
            false,
        ),
        MotionRequest::Replan { prev, position } => {
            match replan_path(&prev, &job.env, position, &job.limits, &job.cfg, &mut rng) {
                Ok(r) => (Ok(r.solution), r.kept_previous),
                Err(e) => (Err(e), false),
            }
        }
    };
    MotionDone { result, kept_previous, elapsed: clock.elapsed() }
}

/// FIFO worker: results come back in submission order in both modes.
pub struct Worker<J, D> {
    inner: Inner<J, D>,
}

enum Inner<J, D> {
    Inline { run: fn(J) -> D, done: VecDeque<D> },
    Thread { tx: Option<Sender<J>>, rx: Receiver<D>, handle: Option<JoinHandle<()>> },
}

impl<J: Send + 'static, D: Send + 'static> Worker<J, D> {
    pub fn new(mode: ExecutionMode, run: fn(J) -> D) -> Self {
        let inner = match mode {
            ExecutionMode::Deterministic => Inner::Inline { run, done: VecDeque::new() },
            ExecutionMode::Threaded => {
                let (job_tx, job_rx) = channel::<J>();
                let (done_tx, done_rx) = channel::<D>();
                let handle = std::thread::spawn(move || {
                    for job in job_rx {
                        if done_tx.send(run(job)).is_err() {
                            break;
                        }
                    }
                });
                Inner::Thread { tx: Some(job_tx), rx: done_rx, handle: Some(handle) }
            }
        };
        Self { inner }
    }

    pub fn submit(&mut self, job: J) {
        match &mut self.inner {
            Inner::Inline { run, done } => done.push_back(run(job)),
            Inner::Thread { tx, .. } => tx
                .as_ref()
                .expect("worker is running")
                .send(job)
                .expect("worker thread exited early"),
        }
    }

    pub fn recv(&mut self) -> D {
        match &mut self.inner {
            Inner::Inline { done, .. } => done.pop_front().expect("recv without a pending job"),
            Inner::Thread { rx, .. } => rx.recv().expect("worker thread exited early"),
        }
    }

    pub fn call(&mut self, job: J) -> D {
        self.submit(job);
        self.recv()
    }
}

impl<J, D> Drop for Worker<J, D> {
    fn drop(&mut self) {
        if let Inner::Thread { tx, handle, .. } = &mut self.inner {
            tx.take();
            if let Some(h) = handle.take() {
                let _ = h.join();
            }
        }
    }
}
