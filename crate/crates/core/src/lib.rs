//! Two-layer autonomous underwater vehicle planning: a time-budgeted mission
//! router over a task graph, a B-spline motion planner in a dynamic ocean
//! model, three population-based optimizers and the executive that keeps the
//! two layers in step.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, with `*32` variants for `f32`.

pub mod env;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod mission;
pub mod motion;
pub mod opt;
pub mod scalar;
pub mod scenarios;
pub mod synchron;

pub use error::{Error, Result};
pub use geometry::Vec3;
pub use scalar::Real;

pub type Environment = env::Environment<f64>;
pub type TraversabilityGrid = env::TraversabilityGrid<f64>;
pub type CurrentField = env::CurrentField<f64>;
pub type Obstacle = env::Obstacle<f64>;
pub type TaskGraph = graph::TaskGraph<f64>;
pub type Route = graph::Route<f64>;
pub type EngineConfig = opt::EngineConfig<f64>;
pub type MissionPlan = mission::MissionPlan<f64>;
pub type PathSolution = motion::PathSolution<f64>;
pub type SynchronConfig = synchron::SynchronConfig<f64>;
pub type MissionReport = synchron::MissionReport<f64>;

pub type Environment32 = env::Environment<f32>;
pub type TaskGraph32 = graph::TaskGraph<f32>;
pub type Route32 = graph::Route<f32>;
pub type EngineConfig32 = opt::EngineConfig<f32>;
pub type MissionPlan32 = mission::MissionPlan<f32>;
pub type PathSolution32 = motion::PathSolution<f32>;
pub type MissionReport32 = synchron::MissionReport<f32>;
