use std::process::ExitCode;

use thiserror::Error;
use xymqc::analysis::AnalysisError;
use xymqc::edsim::EdError;
use xymqc::xychain::XyError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Compute(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(3),
        }
    }
}

impl From<XyError> for CliError {
    fn from(e: XyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<EdError> for CliError {
    fn from(e: EdError) -> Self {
        match e {
            EdError::Length(_) | EdError::InfiniteChain | EdError::Site { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Xy(x) => x.into(),
            AnalysisError::Grid(_)
            | AnalysisError::UnknownColumn(_)
            | AnalysisError::NeedsFiniteChain => CliError::Usage(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
