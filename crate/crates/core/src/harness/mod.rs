//! Batch orchestration behind the command-line tool.

mod config;
mod run;
mod wire;

pub use config::{Overrides, RunConfig, ENV_PREFIX};
pub use run::{
    compute_metrics, generate_fixtures, read_jsonl, run_metrics, run_mutate, run_tptp_export,
    run_verify, verify_records, write_jsonl, Summary,
};
pub use wire::{FolFields, InstanceRecord, ReportRecord, Verdict};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Schema(_) => 3,
            HarnessError::Io(_) => 1,
        }
    }
}
