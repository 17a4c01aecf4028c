use std::process::ExitCode;

use contextlab::catalog::CatalogError;
use contextlab::spectral::SpectralError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Check = 1,
    Input = 2,
    Structural = 3,
}

/// Failure carrying its exit code and the `{"error", "residual"}` payload.
#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
    pub residual: Option<f64>,
}

#[derive(Serialize)]
struct Payload<'a> {
    error: &'a str,
    residual: Option<f64>,
}

impl CliError {
    pub fn new(exit: Exit, message: impl Into<String>, residual: Option<f64>) -> Self {
        Self {
            exit,
            message: message.into(),
            residual,
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(Exit::Input, message, None)
    }

    pub fn check(message: impl Into<String>, residual: Option<f64>) -> Self {
        Self::new(Exit::Check, message, residual)
    }

    /// Writes the payload to stderr and returns the exit code.
    pub fn report(&self) -> ExitCode {
        let payload = Payload {
            error: &self.message,
            residual: self.residual,
        };
        eprint!("{}", contextlab::json::to_string(&payload).expect("payload serializes"));
        ExitCode::from(self.exit as u8)
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        let exit = if e.is_structural() { Exit::Structural } else { Exit::Check };
        Self::new(exit, e.to_string(), e.residual())
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        let exit = match &e {
            _ if e.is_structural() => Exit::Structural,
            CatalogError::Parse(_) | CatalogError::InvalidParameter(_) | CatalogError::CutoffTooSmall { .. } => {
                Exit::Input
            }
            _ => Exit::Check,
        };
        Self::new(exit, e.to_string(), e.residual())
    }
}
