use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("lower parameter b = {0} is a nonpositive integer")]
    PoleParameter(f64),
    #[error("overflow evaluating {what} at {arg}")]
    Overflow { what: &'static str, arg: f64 },
    #[error("adaptive step control failed at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },
    #[error("Wronskian identity violated at t = {t}: |W - exp(-f)| = {error:e}")]
    WronskianViolation { t: f64, error: f64 },
    #[error("t = {t} lies outside the span [{lo}, {hi}]")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },
    #[error("t = {t} is outside the system's domain")]
    DomainViolation { t: f64 },
    #[error("sampling too coarse to resolve zeros near t = {t}")]
    ResolutionWarning { t: f64 },
    #[error("focal point: u2 vanishes at t = {t}")]
    FocalPoint { t: f64 },
    #[error("value {value} is outside the image of the map")]
    OutOfImage { value: f64 },
    #[error("quadratic form is not positive at t = {t}")]
    NonPositive { t: f64 },
    #[error("mapped state does not fit the target grid (leakage {leakage:e})")]
    GridOverflow { leakage: f64 },
    #[error("grid half-width {have} is narrower than the required {need}")]
    GridTooNarrow { have: f64, need: f64 },
    #[error("invariant has continuous spectrum (Omega~^2 = {omega_sq})")]
    ContinuousSpectrum { omega_sq: f64 },
    #[error("oscillator is not underdamped (omega = {omega}, gamma = {gamma})")]
    Overdamped { gamma: f64, omega: f64 },
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("boundary amplitude {amplitude:e} exceeded tolerance at t = {t}")]
    BoundaryLeak { t: f64, amplitude: f64 },
    #[error("banded linear solve failed (zero pivot at row {row})")]
    SolveFailure { row: usize },
    #[error("quantum map for forced systems (Lambda != 0) is not supported")]
    ForcedSystem,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
