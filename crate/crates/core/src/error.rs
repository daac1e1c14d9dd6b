use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("degenerate clustering: k = {k} exceeds {distinct} distinct intensities")]
    DegenerateCluster { k: usize, distinct: usize },
    #[error("position ({x:.3}, {y:.3}, {z:.3}) lies outside the operating volume")]
    OutOfBounds { x: f64, y: f64, z: f64 },
    #[error("obstacle placement: {0}")]
    Placement(String),
    #[error("graph build: {0}")]
    GraphBuild(String),
    #[error("invalid route: {0}")]
    InvalidRoute(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("optimizer initialization: every initial individual was infeasible")]
    Initialization,
    #[error("mission planning: {0}")]
    Planning(String),
    #[error("re-planning disconnected waypoint {here} from the destination")]
    InfeasibleReplan { here: usize },
    #[error("path endpoint {0} is not in navigable water")]
    Endpoint(&'static str),
    #[error("spline: {0}")]
    Spline(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
