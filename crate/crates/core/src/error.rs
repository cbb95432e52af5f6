use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix pencil (M, K) is singular: every probe shift gave a condition estimate above 1e14")]
    SingularPencil,

    #[error("matrix is numerically singular (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("frequency block {index} (p = {harmonic}) is singular")]
    SingularFrequencyBlock { index: usize, harmonic: i64 },

    #[error("implicit step to t = {time} did not converge after {iterations} iterations (last update norm {residual:e})")]
    StepNotConverged {
        time: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("inner iteration of outer step {outer} hit the cap of {cap} iterations (last error {last_error:e})")]
    InnerNotConverged {
        outer: usize,
        cap: usize,
        last_error: f64,
    },

    #[error("inner iteration of outer step {outer} diverged: error rose for {rises} consecutive iterations (last error {last_error:e})")]
    Diverged {
        outer: usize,
        rises: usize,
        last_error: f64,
    },

    #[error("operation requires a linear problem")]
    NotLinear,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("failed to parse problem file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
