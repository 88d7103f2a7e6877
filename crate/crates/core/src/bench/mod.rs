//! Benchmark harness: task manifests with per-task gold programs and
//! descriptions, a seeded synthetic fixture generator, evaluation of system
//! submissions per task kind, and JSON/CSV reports.
//!
//! On-disk layout:
//!
//! ```text
//! <root>/manifest.json
//! <root>/tasks/<task_id>/summary.txt
//! <root>/tasks/<task_id>/steps.json        [{"start": s, "end": s, "sentence": "..."}]
//! <root>/tasks/<task_id>/gold.ipa
//! <root>/tasks/<task_id>/env.json
//! <root>/tasks/<task_id>/video.meta.json   optional {"path": ..., "duration_s": ...}
//! ```
//!
//! Submissions are flat directories holding `<task_id>.ipa` (program tasks)
//! or `<task_id>.txt` (text tasks).

mod evaluate;
mod fixtures;
mod manifest;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use evaluate::{
    evaluate_run, write_reference_submissions, Aggregates, EvalConfig, EvaluationReport, ReferenceField,
    SubmissionStatus, TaskRecord,
};
pub use fixtures::{bundled_environment, generate_fixtures, FixtureSummary};
pub use manifest::{load_manifest, Manifest, ManifestDiagnostic, Step, TaskEntry, VideoMeta};
pub use report::{render_report, write_report, ReportFormat};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("report serialization: {0}")]
    Serialize(String),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}

/// The ten benchmark task categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Spreadsheet,
    SpreadsheetBrowserSimple,
    SpreadsheetBrowserElaborate,
    Webmail,
    SpreadsheetWebmail,
    WebmailBrowser,
    BrowserSpreadsheetWebmail,
    BrowserSocial,
    BrowserSocialSpreadsheet,
    DifferentOs,
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::Spreadsheet,
        Category::SpreadsheetBrowserSimple,
        Category::SpreadsheetBrowserElaborate,
        Category::Webmail,
        Category::SpreadsheetWebmail,
        Category::WebmailBrowser,
        Category::BrowserSpreadsheetWebmail,
        Category::BrowserSocial,
        Category::BrowserSocialSpreadsheet,
        Category::DifferentOs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Spreadsheet => "spreadsheet",
            Category::SpreadsheetBrowserSimple => "spreadsheet_browser_simple",
            Category::SpreadsheetBrowserElaborate => "spreadsheet_browser_elaborate",
            Category::Webmail => "webmail",
            Category::SpreadsheetWebmail => "spreadsheet_webmail",
            Category::WebmailBrowser => "webmail_browser",
            Category::BrowserSpreadsheetWebmail => "browser_spreadsheet_webmail",
            Category::BrowserSocial => "browser_social",
            Category::BrowserSocialSpreadsheet => "browser_social_spreadsheet",
            Category::DifferentOs => "different_os",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category '{s}'"))
    }
}

/// Which direction a run evaluates: demonstration or text to a program, or
/// demonstration or program to text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    D2P,
    T2P,
    D2T,
    P2T,
}

impl TaskKind {
    pub fn produces_program(self) -> bool {
        matches!(self, TaskKind::D2P | TaskKind::T2P)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::D2P => "d2p",
            TaskKind::T2P => "t2p",
            TaskKind::D2T => "d2t",
            TaskKind::P2T => "p2t",
        }
    }

    /// File extension of a submission for this kind.
    pub fn submission_extension(self) -> &'static str {
        if self.produces_program() {
            crate::lang::FILE_EXTENSION
        } else {
            "txt"
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "d2p" => Ok(TaskKind::D2P),
            "t2p" => Ok(TaskKind::T2P),
            "d2t" => Ok(TaskKind::D2T),
            "p2t" => Ok(TaskKind::P2T),
            _ => Err(format!("unknown task kind '{s}'")),
        }
    }
}
