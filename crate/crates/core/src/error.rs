use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("non-finite integrand value at {0}")]
    Evaluation(String),

    #[error("quadrature rule failed its self-check: {0}")]
    Construction(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("optimizer did not converge after {iterations} iterations (best energy {energy:e} at log_lambda={log_lambda}, y={y_axial})")]
    NonConvergence {
        iterations: usize,
        energy: f64,
        log_lambda: f64,
        y_axial: f64,
    },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("mesh inadequate: {0}")]
    MeshInadequate(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("grid too coarse near argmax: {0}")]
    GridTooCoarse(String),

    #[error("norm mismatch: {0}")]
    NormMismatch(String),

    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
