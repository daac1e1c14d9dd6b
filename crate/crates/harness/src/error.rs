use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration: {0}")]
    Config(String),
    /// A planner ran but produced no admissible result.
    #[error("planning infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Core(#[from] armpa_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("plot: {0}")]
    Plot(String),
}

impl Error {
    /// Process exit code: 1 when planning fails, 2 for configuration and
    /// input problems.
    pub fn exit_code(&self) -> i32 {
        use armpa_core::Error as C;
        match self {
            Error::Infeasible(_) => 1,
            Error::Core(C::Planning(_) | C::InfeasibleReplan { .. } | C::Initialization | C::Endpoint(_)) => 1,
            Error::Core(C::GraphBuild(_) | C::Placement(_)) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}
