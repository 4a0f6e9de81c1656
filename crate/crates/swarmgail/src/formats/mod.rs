//! Line-oriented text files: trajectories, operator schedules, network
//! checkpoints, arenas and CSV tables.
//!
//! Every float is written with Rust's shortest round-trip `Display`, so
//! loading a saved file reproduces each value bit for bit.

mod arena;
mod checkpoint;
mod schedule;
mod tables;
mod trajectory;

use std::path::PathBuf;

pub use arena::{load_arena, save_arena};
pub use checkpoint::{load_checkpoint, parse_checkpoint, save_checkpoint, write_checkpoint};
pub use schedule::{parse_command, write_command};
pub use tables::{read_results, write_metrics, write_results, EvalRow, MetricsWriter};
pub use trajectory::{
    load_demoset, load_trajectory, parse_trajectory, save_demoset, save_trajectory, write_trajectory,
    TRAJECTORY_EXTENSION,
};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("record count mismatch: header says {expected}, found {found}")]
    RecordCount { expected: usize, found: usize },
    #[error("non-finite value on line {line}")]
    NonFinite { line: usize },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Arena(#[from] swarmgail_core::sim::ArenaError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl FormatError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        FormatError::Parse { line, msg: msg.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FormatError::Io { path: path.into(), source }
    }
}

/// Parses a finite float token.
pub(crate) fn float(tok: &str, line: usize) -> Result<f64, FormatError> {
    let v: f64 = tok.parse().map_err(|_| FormatError::parse(line, format!("bad number `{tok}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FormatError::NonFinite { line })
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))
}

pub(crate) fn write_file(path: &std::path::Path, text: &str) -> Result<(), FormatError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| FormatError::io(dir, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| FormatError::io(path, e))
}
