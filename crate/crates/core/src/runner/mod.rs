//! Dataset ingestion, the experiment grid, reports and overlays.

mod config;
mod experiment;
mod ingest;
mod overlay;
mod report;

pub use config::{BackendKind, ExperimentConfig, StrategyEntry};
pub use experiment::{
    run_experiment, run_on_scenes, scene_prompts, segment_scene, Backend, ExperimentOutcome,
    ExperimentRow, FallbackRecord, SceneError, SceneRun, SkipRecord,
};
pub use ingest::{ingest, load_image, load_mask, Dataset, IngestMode, IngestWarning, SceneRecord};
pub use overlay::{draw_overlay, render_overlay};
pub use report::{emit_reports, results_csv, results_markdown, ReportPaths, CSV_HEADER};

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("no usable scenes under {0}")]
    EmptyDataset(PathBuf),
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::EmptyDataset(_) => 3,
            RunError::BackendUnavailable(_) => 4,
            RunError::Io { .. } => 1,
        }
    }
}
