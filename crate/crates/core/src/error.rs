use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Special-function argument or order outside the supported range.
    #[error("special function domain error: {0}")]
    Domain(String),

    #[error("Bessel evaluation failed for order {order} at z = {z}: {reason}")]
    Bessel {
        order: u32,
        z: num_complex::Complex64,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("inadmissible wavenumber {0}: {1}")]
    Wavenumber(num_complex::Complex64, &'static str),

    #[error("invalid node set: {0}")]
    Nodes(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("GMRES stopped after {iterations} iterations at relative residual {residual:.3e}")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("right-hand side is zero")]
    ZeroRhs,

    #[error("singular mode {mode} in the circular separation-of-variables system")]
    SingularMode { mode: i64 },

    #[error("series truncation exceeded {0} modes")]
    Truncation(usize),

    #[error("far-field direction grids differ")]
    GridMismatch,

    #[error("evaluation point ({0:.4}, {1:.4}) is within {2:.3e} of the boundary")]
    TooClose(f64, f64, f64),

    #[error("solution was not converged; refusing to post-process")]
    Unconverged,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("config serialization: {0}")]
    TomlSer(#[from] toml::ser::Error),
}
