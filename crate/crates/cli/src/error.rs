use qaept::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const PROPERTY_FAILURE: u8 = 1;
    pub const VALIDATION: u8 = 2;
    pub const NUMERIC: u8 = 3;
    pub const SPECTRUM: u8 = 4;
    pub const GRID: u8 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Output { .. } => exit::VALIDATION,
            Self::Core(e) => core_exit_code(e),
        }
    }
}

pub fn core_exit_code(e: &Error) -> u8 {
    use exit::*;
    match e {
        Error::InvalidParameter(_)
        | Error::UnknownName { .. }
        | Error::Io(_)
        | Error::DomainViolation { .. }
        | Error::OutOfSpan { .. }
        | Error::PoleParameter(_)
        | Error::ForcedSystem => VALIDATION,
        Error::ContinuousSpectrum { .. } | Error::Overdamped { .. } => SPECTRUM,
        Error::GridOverflow { .. }
        | Error::GridTooNarrow { .. }
        | Error::GridMismatch
        | Error::BoundaryLeak { .. } => GRID,
        _ => NUMERIC,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::config("x").exit_code(), 2);
        assert_eq!(CliError::from(Error::ContinuousSpectrum { omega_sq: -1.0 }).exit_code(), 4);
        assert_eq!(CliError::from(Error::GridOverflow { leakage: 1.0 }).exit_code(), 5);
        assert_eq!(CliError::from(Error::SolveFailure { row: 3 }).exit_code(), 3);
    }
}
