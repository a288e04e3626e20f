use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("term {index} has degree {degree}, expected {expected}")]
    MalformedDegree { index: usize, degree: u32, expected: u32 },

    #[error("expected {expected} components, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("b_{index} = {value} must be positive (choose omega so that alpha*sigma*omega + beta > 0)")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("ground-state iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64, history: Vec<f64> },

    #[error("ground-state iteration collapsed to the trivial attractor")]
    TrivialAttractor,

    #[error("cutoff bound violated: {0}")]
    CutoffBound(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
