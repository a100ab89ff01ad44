use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("signal period mismatch: {left} vs {right}")]
    PeriodMismatch { left: f64, right: f64 },
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("transfer function has a pole on the sampling grid at bin {bin} (omega = {omega})")]
    PoleOnGrid { bin: usize, omega: f64 },
    #[error("input outside the operator domain: {0}")]
    DomainViolation(String),
    #[error("could not bracket the resolvent root for input {input}; is the map really monotone?")]
    BracketFailure { input: f64 },
    #[error("resolvent is singular at bin {bin}")]
    ResolventSingular { bin: usize },
    #[error("iterate became non-finite at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("no child of a sum node has a cheap resolvent")]
    NoBackwardChild,
    #[error("element is not monotone: {0}")]
    NotMonotone(String),
    #[error("tree is not linear: {0}")]
    NotLinear(String),
    #[error("inverse of a zero gain")]
    ZeroDivision,
    #[error("inner fixed-point solve did not converge within {max_iter} iterations")]
    InnerSolveFailed { max_iter: usize },
    #[error("converged to the trivial zero solution (norm {norm:.3e}); check the period and initialization")]
    TrivialFixedPoint { norm: f64 },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
