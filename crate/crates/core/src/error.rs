use thiserror::Error;

/// Errors raised across the solver, the analysis toolkit and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("hermitian symmetry violated: imaginary residue {residue:.3e} exceeds {tolerance:.1e}")]
    HermitianViolation { residue: f64, tolerance: f64 },

    #[error("fields are defined on different grids")]
    GridMismatch,

    #[error("block {j} outside resolvable range [{min}, {max}]")]
    BlockOutOfRange { j: i32, min: i32, max: i32 },

    #[error("unsupported Lebesgue exponent {0}; only 2 and infinity are available")]
    UnsupportedExponent(f64),

    #[error("only {available} resolvable blocks, at least {required} required")]
    InsufficientRange { available: usize, required: usize },

    #[error("curl inputs are not curls of the state: mismatch {mismatch:.3e} exceeds {tolerance:.1e}")]
    ConsistencyViolation { mismatch: f64, tolerance: f64 },

    #[error("Picard iteration failed to contract after {iterations} iterations (last ratio {ratio:.3})")]
    NoConvergence { iterations: usize, ratio: f64 },

    #[error("instability at t = {time}: norm {norm:.3e} exceeds the overflow guard")]
    Instability { time: f64, norm: f64 },

    #[error("insufficient diagnostics data: {0}")]
    InsufficientData(String),

    #[error("window [{start}, {end}] is not covered by the series span [{first}, {last}]")]
    WindowUnderflow {
        start: f64,
        end: f64,
        first: f64,
        last: f64,
    },

    #[error("exponent p = {0} outside (3/2, inf)")]
    ExponentOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}{}: {message}", key.as_ref().map(|k| format!(" (key `{k}`)")).unwrap_or_default())]
    Parse {
        line: usize,
        key: Option<String>,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
