use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("window [{lo}, {hi}] is not contained in the grid span [{grid_lo}, {grid_hi}]")]
    WindowOutsideGrid {
        lo: f64,
        hi: f64,
        grid_lo: f64,
        grid_hi: f64,
    },

    #[error("need at least {needed} nodes, found {found}")]
    TooFewNodes { needed: usize, found: usize },

    #[error("singular tridiagonal system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("operator is not parabolic: second-order coefficient {value} at node {index}")]
    NonParabolic { index: usize, value: f64 },

    #[error("truncation too small: upper bound {upper} is below {required}")]
    TruncationTooSmall { upper: f64, required: f64 },

    #[error("non-positive strike curvature at K = {strikes:?}")]
    CurvatureViolation { strikes: Vec<f64> },

    #[error("quotes violate no-arbitrage ({kind}) at K = {strikes:?}")]
    Arbitrage { kind: &'static str, strikes: Vec<f64> },

    #[error("calibration did not converge after {iterations} iterations (residual history {residuals:?})")]
    NonConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("field does not vanish on the spatial boundary (|z| = {value} at tau = {tau})")]
    BoundaryHypothesis { tau: f64, value: f64 },

    #[error("weights undefined at tau = {tau}: must lie strictly inside (0, {horizon})")]
    WeightTime { tau: f64, horizon: f64 },

    #[error("invalid domain nesting: {0}")]
    Nesting(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. }
                | Error::CurvatureViolation { .. }
                | Error::NonConvergence { .. }
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
