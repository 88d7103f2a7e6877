use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Category;
use crate::env::{validate_process, Environment};
use crate::ir::{is_identifier, Process};
use crate::lang;

pub(crate) const MANIFEST_FILE: &str = "manifest.json";
pub(crate) const TASKS_DIR: &str = "tasks";
pub(crate) const SUMMARY_FILE: &str = "summary.txt";
pub(crate) const STEPS_FILE: &str = "steps.json";
pub(crate) const GOLD_FILE: &str = "gold.ipa";
pub(crate) const ENV_FILE: &str = "env.json";
pub(crate) const VIDEO_FILE: &str = "video.meta.json";

/// One described segment of the task recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub start: f64,
    pub end: f64,
    pub sentence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoMeta {
    pub path: String,
    pub duration_s: f64,
}

#[derive(Debug, Clone)]
pub struct TaskEntry {
    pub task_id: String,
    pub category: Category,
    pub summary: String,
    pub steps: Vec<Step>,
    pub gold_program: PathBuf,
    pub gold: Process,
    pub environment: Environment,
    pub video: Option<VideoMeta>,
    pub os_label: Option<String>,
    /// Task directory; relative image paths in the gold program resolve here.
    pub dir: PathBuf,
}

impl TaskEntry {
    /// Step sentences joined into one text.
    pub fn step_text(&self) -> String {
        self.steps.iter().map(|s| s.sentence.as_str()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub name: String,
    pub root: PathBuf,
    pub tasks: Vec<TaskEntry>,
}

impl Manifest {
    pub fn task(&self, task_id: &str) -> Option<&TaskEntry> {
        self.tasks.iter().find(|t| t.task_id == task_id)
    }

    pub fn category_counts(&self) -> Vec<(Category, usize)> {
        Category::ALL
            .into_iter()
            .map(|c| (c, self.tasks.iter().filter(|t| t.category == c).count()))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ManifestFile {
    pub name: String,
    pub tasks: Vec<ManifestTask>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ManifestTask {
    pub task_id: String,
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub os_label: Option<String>,
}

/// Problem found while loading a manifest, located by file and, for program
/// files, by line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestDiagnostic {
    pub task_id: Option<String>,
    pub file: PathBuf,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ManifestDiagnostic {
    fn new(task_id: Option<&str>, file: &Path, message: impl Into<String>) -> Self {
        Self {
            task_id: task_id.map(str::to_string),
            file: file.to_path_buf(),
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ManifestDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
            if let Some(col) = self.column {
                write!(f, ":{col}")?;
            }
        }
        write!(f, ": {}", self.message)
    }
}

struct Loader<'a> {
    root: &'a Path,
    diagnostics: Vec<ManifestDiagnostic>,
}

impl Loader<'_> {
    fn report(&mut self, task_id: Option<&str>, file: &Path, message: impl Into<String>) {
        let rel = file.strip_prefix(self.root).unwrap_or(file);
        self.diagnostics.push(ManifestDiagnostic::new(task_id, rel, message));
    }

    fn read(&mut self, task_id: Option<&str>, path: &Path) -> Option<String> {
        match fs::read_to_string(path) {
            Ok(text) => Some(text),
            Err(e) => {
                self.report(task_id, path, format!("cannot read: {e}"));
                None
            }
        }
    }

    fn json<T: for<'de> Deserialize<'de>>(&mut self, task_id: Option<&str>, path: &Path) -> Option<T> {
        let text = self.read(task_id, path)?;
        match serde_json::from_str(&text) {
            Ok(v) => Some(v),
            Err(e) => {
                self.report(task_id, path, format!("invalid JSON: {e}"));
                None
            }
        }
    }

    fn task(&mut self, entry: &ManifestTask) -> Option<TaskEntry> {
        let id = entry.task_id.as_str();
        let manifest_path = self.root.join(MANIFEST_FILE);
        let category = match entry.category.parse::<Category>() {
            Ok(c) => Some(c),
            Err(message) => {
                self.report(Some(id), &manifest_path, format!("task {id}: {message}"));
                None
            }
        };
        let dir = self.root.join(TASKS_DIR).join(id);
        if !dir.is_dir() {
            self.report(Some(id), &dir, "missing task directory");
            return None;
        }

        let summary = self.read(Some(id), &dir.join(SUMMARY_FILE));
        let steps: Option<Vec<Step>> = self.json(Some(id), &dir.join(STEPS_FILE));
        if let Some(steps) = &steps {
            self.check_steps(id, &dir.join(STEPS_FILE), steps);
        }

        let gold_path = dir.join(GOLD_FILE);
        let gold = self.read(Some(id), &gold_path).and_then(|text| match lang::parse(&text) {
            Ok(p) => Some(p),
            Err(diags) => {
                let rel = gold_path.strip_prefix(self.root).unwrap_or(&gold_path).to_path_buf();
                self.diagnostics.extend(diags.into_iter().map(|d| ManifestDiagnostic {
                    task_id: Some(id.to_string()),
                    file: rel.clone(),
                    line: Some(d.line),
                    column: Some(d.column),
                    message: d.message,
                }));
                None
            }
        });

        let env_path = dir.join(ENV_FILE);
        let environment = self.read(Some(id), &env_path).and_then(|text| match Environment::from_json(&text) {
            Ok(e) => Some(e),
            Err(e) => {
                self.report(Some(id), &env_path, e.to_string());
                None
            }
        });

        if let (Some(gold), Some(env)) = (&gold, &environment) {
            for v in validate_process(gold, env).violations {
                self.report(Some(id), &gold_path, v.to_string());
            }
        }

        let video_path = dir.join(VIDEO_FILE);
        let video = if video_path.exists() {
            let v: Option<VideoMeta> = self.json(Some(id), &video_path);
            if let Some(v) = &v {
                if !(v.duration_s >= 0.0) {
                    self.report(Some(id), &video_path, "duration_s must be non-negative");
                }
            }
            v
        } else {
            None
        };

        Some(TaskEntry {
            task_id: id.to_string(),
            category: category?,
            summary: summary?.trim_end().to_string(),
            steps: steps?,
            gold_program: gold_path,
            gold: gold?.with_id(id),
            environment: environment?,
            video,
            os_label: entry.os_label.clone(),
            dir,
        })
    }

    fn check_steps(&mut self, id: &str, path: &Path, steps: &[Step]) {
        let mut prev_end = f64::NEG_INFINITY;
        for (i, s) in steps.iter().enumerate() {
            if !(s.start >= 0.0) {
                self.report(Some(id), path, format!("step {}: negative start {}", i + 1, s.start));
            }
            if !(s.start < s.end) {
                self.report(Some(id), path, format!("step {}: start {} is not before end {}", i + 1, s.start, s.end));
            }
            if s.start < prev_end {
                self.report(
                    Some(id),
                    path,
                    format!("step {}: segment starting at {} overlaps the previous one", i + 1, s.start),
                );
            }
            prev_end = prev_end.max(s.end);
        }
    }
}

/// Load and validate a benchmark rooted at `root`. Every problem found is
/// returned, not only the first.
pub fn load_manifest(root: impl AsRef<Path>) -> Result<Manifest, Vec<ManifestDiagnostic>> {
    let root = root.as_ref();
    let mut loader = Loader {
        root,
        diagnostics: Vec::new(),
    };
    let manifest_path = root.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        loader.report(None, &manifest_path, "missing manifest");
        return Err(loader.diagnostics);
    }
    let Some(file) = loader.json::<ManifestFile>(None, &manifest_path) else {
        return Err(loader.diagnostics);
    };

    let mut seen = BTreeSet::new();
    let mut tasks = Vec::with_capacity(file.tasks.len());
    for entry in &file.tasks {
        let id = entry.task_id.as_str();
        if !is_identifier(id) {
            loader.report(Some(id), &manifest_path, format!("invalid task id {id:?}"));
            continue;
        }
        if !seen.insert(id) {
            loader.report(Some(id), &manifest_path, format!("duplicate task id {id}"));
            continue;
        }
        if let Some(task) = loader.task(entry) {
            tasks.push(task);
        }
    }

    if loader.diagnostics.is_empty() {
        Ok(Manifest {
            name: file.name,
            root: root.to_path_buf(),
            tasks,
        })
    } else {
        Err(loader.diagnostics)
    }
}
