//! Batch front end: structure files in, verification reports out.

pub mod fixtures;
pub mod report;
pub mod structure;
pub mod suites;

pub use report::{Report, Verdict};
pub use structure::Structure;
pub use suites::{run, run_structure, RunConfig, Selection, Suite};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("TOML error: {0}")]
    Toml(String),
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] shlie_core::Error),
    #[error("usage: {0}")]
    Usage(String),
}
