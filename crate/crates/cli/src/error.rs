use edgeav_core::ingest::IngestError;
use edgeav_core::search::SearchError;
use thiserror::Error;

/// Failure classes with distinct process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Missing or unreadable input, or input the analysis cannot use.
    #[error("{0}")]
    Input(String),
    /// An input file exists but is not in the expected format.
    #[error("{0}")]
    Format(String),
    /// A configuration search ran out of budget or cannot terminate.
    #[error("{0}")]
    Budget(String),
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_FORMAT: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

/// Process exit code for an error, from the first classifiable cause.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Input(_) => EXIT_INPUT,
                CliError::Format(_) => EXIT_FORMAT,
                CliError::Budget(_) => EXIT_BUDGET,
            };
        }
        if let Some(e) = cause.downcast_ref::<IngestError>() {
            return match e {
                IngestError::Format { .. } | IngestError::InvalidGrid(_) | IngestError::InvalidProfile(_) => EXIT_FORMAT,
                _ => EXIT_INPUT,
            };
        }
        if let Some(e) = cause.downcast_ref::<SearchError>() {
            return match e {
                SearchError::BudgetExceeded { .. } | SearchError::Stalled { .. } => EXIT_BUDGET,
                _ => EXIT_INPUT,
            };
        }
        if cause.is::<csv::Error>() || cause.is::<serde_json::Error>() || cause.is::<toml::de::Error>() {
            return EXIT_FORMAT;
        }
    }
    EXIT_INPUT
}
