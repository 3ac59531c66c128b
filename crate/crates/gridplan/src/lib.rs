//! File formats, configuration and the end-to-end pipeline around
//! [`gridplan_core`].
//!
//! - [`pnm`]: graymap input, graymap/pixmap output, class and overlay rendering.
//! - [`scene`]: the JSON scene graph of a world.
//! - [`trace`]: CSV export of a chain trace.
//! - [`config`]: the TOML run configuration.
//! - [`pipeline`]: load, classify, run chains and write every artifact.

use std::path::PathBuf;

pub mod config;
pub mod pipeline;
pub mod pnm;
pub mod scene;
pub mod trace;

pub use config::RunConfig;
pub use pipeline::{run_pipeline, RunSummary};

/// Process exit codes of the command-line tool.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const IO: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const INVARIANT: u8 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("malformed raster: {0}")]
    MalformedRaster(String),
    #[error("I/O failure on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] gridplan_core::Error),
}

impl Error {
    /// Exit code reported by the command-line tool for this error.
    pub fn exit_code(&self) -> u8 {
        use gridplan_core::Error as Core;
        match self {
            Error::FileNotFound(_) | Error::MalformedRaster(_) | Error::Io { .. } => exit::IO,
            Error::Config(_) => exit::CONFIG,
            Error::Core(Core::ScoreDivergence { .. }) => exit::INVARIANT,
            Error::Core(
                Core::InvalidThresholds { .. } | Core::InvalidParameter(_) | Core::CandidateExplosion { .. },
            ) => exit::CONFIG,
            Error::Core(_) => exit::INVARIANT,
        }
    }
}
