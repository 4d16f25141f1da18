use alloc::string::String;

/// Errors raised by the numerical engine.
///
/// Variants are split into input problems (bad shapes, bad text, violated
/// preconditions) and numeric guards (singular bands, vanishing pivots,
/// enumeration limits). [`Error::is_numeric_guard`] tells the two apart.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric at ({i}, {j}): |m[i][j] + m[j][i]| = {residual:e}")]
    NotSkew { i: usize, j: usize, residual: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("indices must be strictly increasing (found {prev} then {next})")]
    UnsortedIndices { prev: usize, next: usize },

    #[error("expected an even dimension, got {0}")]
    OddDimension(usize),

    #[error("expected an odd dimension, got {0}")]
    EvenDimension(usize),

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("parse error at position {position}: unexpected {found:?}")]
    Parse { position: usize, found: char },

    #[error("{0}")]
    InvalidArgument(String),

    #[error(
        "theta = {theta} at site {site} lies within {band:e} of a tan/cot singularity \
         (0, pi, 2pi); use the m-form path instead"
    )]
    SingularAngle { site: usize, theta: f64, band: f64 },

    #[error("target base configuration has zero amplitude: pf(R restricted to {rows:?}) = {value:e}")]
    ZeroAmplitudeBase { rows: alloc::vec::Vec<usize>, value: f64 },

    #[error("state has a non-vacuum base configuration that cannot be rotated to the vacuum")]
    NonVacuumBase,

    #[error("enumeration over 2^{sites} configurations exceeds the limit of 2^{limit}")]
    EnumerationLimit { sites: usize, limit: usize },

    #[error("measurement outcome has zero probability ({0:e})")]
    ZeroProbability(f64),

    #[error("singular matrix encountered while computing {0}")]
    Singular(&'static str),

    #[error("vacuum overlap {0:e} is below 1e-12; the state has no vacuum-based form")]
    VanishingVacuum(f64),

    #[error("gapless Bogoliubov mode near momentum k = +/-{k} (energy {energy:e})")]
    Gapless { k: f64, energy: f64 },

    #[error("need at least {need} points in the fit window, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("non-positive value {value:e} at d = {d} cannot be fitted on a log scale")]
    NonPositive { d: usize, value: f64 },

    #[error("iterative eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),
}

impl Error {
    /// True for failures caused by numerics (singularities, guards), as
    /// opposed to malformed input.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::SingularAngle { .. }
                | Error::ZeroAmplitudeBase { .. }
                | Error::NonVacuumBase
                | Error::EnumerationLimit { .. }
                | Error::ZeroProbability(_)
                | Error::Singular(_)
                | Error::VanishingVacuum(_)
                | Error::Gapless { .. }
                | Error::NonPositive { .. }
                | Error::NoConvergence(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
