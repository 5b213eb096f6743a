use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),

    #[error("extension point coincides with domain point {0}")]
    PointInDomain(usize),

    #[error("map is not ({k}, {alpha})-Hölder: pair ({i}, {j}) has target distance {lhs} > {rhs}")]
    NotHolder { k: f64, alpha: f64, i: usize, j: usize, lhs: f64, rhs: f64 },

    #[error("cone net construction failed: {0}")]
    NetConstruction(String),

    #[error("modulus condition violated at y={y}, z={z}, t={t}, s={s}: excess {excess}")]
    ModulusViolated { y: usize, z: usize, t: usize, s: usize, excess: f64 },

    #[error("no admissible value for coordinate {coordinate}: interval [{lo}, {hi}] is empty")]
    Infeasible { coordinate: String, lo: f64, hi: f64 },

    #[error("K^(2N) exceeds the double-precision safety bound; largest safe N is {max_safe_n}")]
    PrecisionExceeded { max_safe_n: u32 },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Errors caused by the caller's data, as opposed to a failed verification.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Inconsistent(_) | Error::Infeasible { .. })
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
