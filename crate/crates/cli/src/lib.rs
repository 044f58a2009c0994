//! Campaign orchestration and reporting behind the `qbench` binary.

pub mod campaign;
pub mod config;
pub mod report;

use qbench_core::store::StoreError;
use thiserror::Error;

pub use campaign::{run_campaign, CampaignSummary, TargetSummary};
pub use config::{CampaignConfig, QubitRange, TargetSpec};
pub use report::{write_report, ReportKind, ReportSummary};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("store: {0}")]
    Store(#[from] StoreError),
    #[error("empty report: {0}")]
    EmptyReport(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Store(_) => 3,
            CliError::EmptyReport(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Store(StoreError::Io(e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Store(StoreError::Csv(e))
    }
}
