//! File formats and request plumbing shared by the CLI, the HTTP service and
//! the C bindings.
//!
//! * [`layout_doc`]: versioned JSON floor plans
//! * [`presets`]: named radio configurations (built in or TOML files)
//! * [`csv_format`]: heatmap and sweep tables
//! * [`fixtures`]: the layouts shipped with the crate
//! * [`job`]: one request/response shape for every evaluation mode

pub mod csv_format;
pub mod fixtures;
pub mod job;
pub mod layout_doc;
pub mod presets;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::scenario::ScenarioError;

pub use csv_format::{heatmap_csv, heatmap_rows, read_heatmap_csv, sweep_csv, HeatmapRow};
pub use fixtures::{fixture, fixture_document, FIXTURE_NAMES};
pub use job::{run_job, ErrorBody, JobContext, JobError, JobMode, JobRequest, JobResponse};
pub use layout_doc::{parse_layout, parse_layout_document, LayoutDocument};
pub use presets::{resolve_preset, ParamOverrides, DEFAULT_PRESET, PRESET_DIR_ENV};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}{}: {message}", location(*.line, *.column))]
    Schema { path: String, line: Option<usize>, column: Option<usize>, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("unknown preset {name:?}; available: {}", available.join(", "))]
    UnknownPreset { name: String, available: Vec<String> },
    #[error("unknown layout fixture {name:?}; available: {}", available.join(", "))]
    UnknownFixture { name: String, available: Vec<String> },
    #[error("{path}: {message}")]
    Preset { path: String, message: String },
    #[error("CSV: {0}")]
    Csv(String),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
}

fn location(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" (line {l}, column {c})"),
        (Some(l), None) => format!(" (line {l})"),
        _ => String::new(),
    }
}

impl IoError {
    pub fn schema(path: &str, message: impl Into<String>) -> Self {
        Self::Schema { path: path.into(), line: None, column: None, message: message.into() }
    }

    pub(crate) fn from_json_path(e: serde_path_to_error::Error<serde_json::Error>) -> Self {
        Self::from_json_path_in("", e)
    }

    /// As [`IoError::from_json_path`] with `prefix` prepended to the path.
    pub(crate) fn from_json_path_in(prefix: &str, e: serde_path_to_error::Error<serde_json::Error>) -> Self {
        let inner = e.inner();
        let (line, column) = if inner.line() > 0 { (Some(inner.line()), Some(inner.column())) } else { (None, None) };
        let mut message = inner.to_string();
        // serde_json appends its own location; it is reported separately.
        if let Some(i) = message.rfind(" at line ") {
            message.truncate(i);
        }
        let inner_path = e.path().to_string();
        let path = match (prefix.is_empty(), inner_path.as_str()) {
            (true, p) => p.to_string(),
            (false, ".") => prefix.to_string(),
            (false, p) if p.starts_with('[') => format!("{prefix}{p}"),
            (false, p) => format!("{prefix}.{p}"),
        };
        Self::Schema { path, line, column, message }
    }

    pub fn file(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::File { path: path.display().to_string(), source }
    }
}

/// Reads a UTF-8 text file, naming it on failure.
pub fn read_text(path: &std::path::Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))
}
