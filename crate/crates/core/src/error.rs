use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mixture has no species")]
    EmptyMixture,
    #[error("species {index}: diameter must be positive, got {value}")]
    NonPositiveDiameter { index: usize, value: f64 },
    #[error("species {index}: number density must be non-negative, got {value}")]
    NegativeDensity { index: usize, value: f64 },
    #[error("charge imbalance: sum of rho*z is {0:e}")]
    ChargeImbalance(f64),
    #[error("coulomb coupling alpha^2 must be non-negative, got {0}")]
    NegativeCoupling(f64),
    #[error("packing fraction {0} is not below 1")]
    PackingOverflow(f64),
    #[error("packing fraction {0} is outside the admissible range")]
    EtaOutOfRange(f64),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("index {index} out of range for {len} species")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("system carries no charge")]
    NotCharged,
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("screening parameter is zero")]
    ZeroGamma,
    #[error("coupling argument x must be non-negative, got {0}")]
    NegativeX(f64),
    #[error("quadrature too coarse: {coarse} vs {fine} after doubling nodes")]
    QuadTooCoarse { coarse: f64, fine: f64 },
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("1 - rho*c(k) vanishes at k = {k}")]
    PoleEncountered { k: f64 },
    #[error("correlation table is not converged")]
    NotConverged,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors caused by the input rather than by a solver failing.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. }
                | Error::QuadTooCoarse { .. }
                | Error::PoleEncountered { .. }
                | Error::NotConverged
                | Error::ZeroGamma
        )
    }
}
