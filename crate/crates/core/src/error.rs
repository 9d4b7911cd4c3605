use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical modules.
///
/// Every message starts with the name of the module that raised it, so a
/// failure printed by the command-line front end can be traced without a
/// backtrace.
#[derive(Debug, Error)]
pub enum Error {
    #[error("poly: point has dimension {got}, polynomial has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("poly: unsupported dimension {0} (only 2 and 3)")]
    UnsupportedDimension(usize),

    #[error("poly: direction is not a unit vector (|w| = {0})")]
    NonUnitDirection(f64),

    #[error("poly: polynomial is identically zero")]
    ZeroPolynomial,

    #[error("poly: parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("geometry: base point lies on the zero set (p(a) = {value:e})")]
    BasePointOnZero { value: f64 },

    #[error("geometry: degenerate direction ({0})")]
    DegenerateDirection(String),

    #[error("geometry: zero set is not oscillatory at the base point ({0})")]
    NotOscillatory(String),

    #[error("geometry: {fraction:.3} of sampled directions are degenerate (limit 0.05)")]
    TooManyDegenerate { fraction: f64 },

    #[error("fbp: sigma grid too coarse ({n_sigma} intervals, need at least 9)")]
    GridTooCoarse { n_sigma: usize },

    #[error("fbp: principal value evaluated at s^2 = {s2:e}, within {epsilon:e} of the sigma range boundary")]
    PvBoundary { s2: f64, epsilon: f64 },

    #[error("levitation: probe at distance {distance:e} from the zero set")]
    NearSingular { distance: f64 },

    #[error("levitation: leading form p_m vanishes on the sphere, p is not elliptic")]
    NonElliptic,

    #[error("{module}: precondition failed: {msg}")]
    Precondition { module: &'static str, msg: String },

    #[error("{module}: invalid input: {msg}")]
    Input { module: &'static str, msg: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Input {
            module,
            msg: msg.into(),
        }
    }

    pub(crate) fn precondition(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition {
            module,
            msg: msg.into(),
        }
    }

    /// True for errors caused by malformed or out-of-range input, as opposed
    /// to numerical preconditions discovered during a computation.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::UnsupportedDimension(_)
                | Error::NonUnitDirection(_)
                | Error::ZeroPolynomial
                | Error::Parse { .. }
                | Error::BasePointOnZero { .. }
                | Error::Input { .. }
                | Error::Io(_)
        )
    }
}
