//! Library side of the `polycurv` command: configuration, task dispatch and
//! report rendering.

pub mod config;
pub mod report;
mod tasks;

use polycurv_core::Error;
use thiserror::Error as ThisError;

pub use config::{parse_config, JobConfig, OutputFormat, Overrides, TaskKind};
pub use report::{Report, Value};
pub use tasks::run;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Math(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Math(_) => 3,
            CliError::Unsupported(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(m) => CliError::Unsupported(m),
            Error::Parse(m) => CliError::Config(m),
            other => CliError::Math(other.to_string()),
        }
    }
}

/// Parses `text`, runs the job and renders it in the requested format.
pub fn execute(text: &str, overrides: &Overrides) -> Result<String, CliError> {
    let config = parse_config(text, overrides)?;
    let report = run(&config)?;
    Ok(match config.output {
        OutputFormat::Text => report.to_text(),
        OutputFormat::Json => report.to_json(),
    })
}
