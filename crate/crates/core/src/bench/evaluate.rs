use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::manifest::TaskEntry;
use super::{BenchError, Category, Manifest, TaskKind};
use crate::ir::{Argument, GrayMatrix, Process};
use crate::lang;
use crate::metrics::{evaluate_pair, ImageComparator, MpoMode, SensitiveErrorConfig};
use crate::text::{bleu_from_stats, tokenize, BleuConfig, BleuScore, NgramStats};

/// Which description serves as the BLEU reference for text tasks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceField {
    #[default]
    Steps,
    Summary,
}

impl ReferenceField {
    pub fn text(self, task: &TaskEntry) -> String {
        match self {
            ReferenceField::Steps => task.step_text(),
            ReferenceField::Summary => task.summary.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub sensitive: SensitiveErrorConfig,
    pub mpo_mode: MpoMode,
    pub bleu: BleuConfig,
    pub reference_field: ReferenceField,
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        self.sensitive.validate().map_err(|e| BenchError::Config(e.to_string()))?;
        self.bleu.validate().map_err(|e| BenchError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubmissionStatus {
    Ok,
    Missing,
    ParseError,
}

/// Metrics for one task. Program tasks fill `strict`, `sensitive` and
/// `mpo`; text tasks fill `bleu` and `ngram_stats` unless excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: String,
    pub category: Category,
    pub task_kind: TaskKind,
    pub status: SubmissionStatus,
    pub strict: Option<u8>,
    pub sensitive: Option<f64>,
    pub mpo: Option<f64>,
    pub bleu: Option<f64>,
    pub ngram_stats: Option<NgramStats>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub tasks: usize,
    pub flagged: usize,
    pub mae_strict: Option<f64>,
    pub mean_sensitive: Option<f64>,
    pub mean_mpo: Option<f64>,
    pub bleu: Option<BleuScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub manifest: String,
    pub task_kind: TaskKind,
    pub config: EvalConfig,
    pub tasks: Vec<TaskRecord>,
    pub aggregates: Aggregates,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl Aggregates {
    /// Aggregate a set of task records. Corpus BLEU is recombined from the
    /// records' n-gram statistics.
    pub fn from_records(records: &[TaskRecord], bleu_cfg: &BleuConfig) -> Self {
        let text_stats: Vec<&NgramStats> = records.iter().filter_map(|r| r.ngram_stats.as_ref()).collect();
        let bleu = (!text_stats.is_empty()).then(|| {
            let mut total = NgramStats::zeros(bleu_cfg.max_n);
            for s in text_stats {
                total.add(s);
            }
            bleu_from_stats(&total, bleu_cfg)
        });
        Self {
            tasks: records.len(),
            flagged: records.iter().filter(|r| r.status != SubmissionStatus::Ok).count(),
            mae_strict: mean(records.iter().filter_map(|r| r.strict.map(f64::from))),
            mean_sensitive: mean(records.iter().filter_map(|r| r.sensitive)),
            mean_mpo: mean(records.iter().filter_map(|r| r.mpo)),
            bleu,
        }
    }
}

fn load_pixels(path: &Path) -> Option<GrayMatrix> {
    let img = image::open(path).ok()?.to_luma8();
    let data = img.as_raw().iter().map(|&v| f64::from(v)).collect();
    GrayMatrix::new(img.height() as usize, img.width() as usize, data).ok()
}

/// Attach pixel data to image arguments whose paths resolve to a readable
/// image under one of `bases`, tried in order.
fn resolve_images(process: &mut Process, bases: &[&Path]) {
    for stmt in &mut process.statements {
        for arg in &mut stmt.args {
            if let Argument::Image(img) = arg {
                if img.pixels.is_none() {
                    img.pixels = bases.iter().find_map(|b| load_pixels(&b.join(img.path())));
                }
            }
        }
    }
}

fn submission_path(dir: &Path, task: &TaskEntry, kind: TaskKind) -> PathBuf {
    dir.join(format!("{}.{}", task.task_id, kind.submission_extension()))
}

fn program_record(task: &TaskEntry, submissions: &Path, kind: TaskKind, cfg: &EvalConfig) -> TaskRecord {
    let mut record = TaskRecord {
        task_id: task.task_id.clone(),
        category: task.category,
        task_kind: kind,
        status: SubmissionStatus::Ok,
        strict: Some(1),
        sensitive: Some(1.0),
        mpo: Some(0.0),
        bleu: None,
        ngram_stats: None,
        diagnostics: Vec::new(),
    };
    let path = submission_path(submissions, task, kind);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            record.status = SubmissionStatus::Missing;
            record
                .diagnostics
                .push(format!("{}: {e}; scored as maximal error", path.display()));
            return record;
        }
    };
    let mut candidate = match lang::parse(&text) {
        Ok(p) => p,
        Err(diags) => {
            record.status = SubmissionStatus::ParseError;
            record
                .diagnostics
                .extend(diags.iter().map(|d| format!("{}:{d}", path.display())));
            record.diagnostics.push("scored as maximal error".into());
            return record;
        }
    };

    let mut gold = task.gold.clone();
    if cfg.sensitive.image_comparator != ImageComparator::Iou {
        resolve_images(&mut gold, &[&task.dir]);
        resolve_images(&mut candidate, &[submissions, &task.dir]);
    }
    let result = evaluate_pair(&candidate, &gold, &cfg.sensitive, cfg.mpo_mode);
    let fallbacks: usize = result.unit_breakdown.iter().map(|b| b.image_fallbacks).sum();
    if fallbacks > 0 {
        record.diagnostics.push(format!(
            "{fallbacks} image argument(s) compared by path: no {} data",
            cfg.sensitive.image_comparator
        ));
    }
    record.strict = Some(result.strict);
    record.sensitive = Some(result.sensitive);
    record.mpo = Some(result.mpo);
    record
}

fn text_record(task: &TaskEntry, submissions: &Path, kind: TaskKind, cfg: &EvalConfig) -> TaskRecord {
    let mut record = TaskRecord {
        task_id: task.task_id.clone(),
        category: task.category,
        task_kind: kind,
        status: SubmissionStatus::Ok,
        strict: None,
        sensitive: None,
        mpo: None,
        bleu: None,
        ngram_stats: None,
        diagnostics: Vec::new(),
    };
    let path = submission_path(submissions, task, kind);
    match fs::read_to_string(&path) {
        Ok(text) => {
            let candidate = tokenize(&text);
            let references = vec![tokenize(&cfg.reference_field.text(task))];
            let stats = NgramStats::for_sentence(&candidate, &references, cfg.bleu.max_n);
            record.bleu = Some(bleu_from_stats(&stats, &cfg.bleu).score);
            record.ngram_stats = Some(stats);
        }
        Err(e) => {
            record.status = if e.kind() == std::io::ErrorKind::NotFound {
                SubmissionStatus::Missing
            } else {
                SubmissionStatus::ParseError
            };
            record
                .diagnostics
                .push(format!("{}: {e}; excluded from BLEU", path.display()));
        }
    }
    record
}

/// Score every task of `manifest` against the submissions in `submissions`.
///
/// Missing or unparsable program submissions score strict 1, sensitive 1,
/// MPO 0. Missing text submissions are left out of BLEU. Both are flagged in
/// the task's record.
pub fn evaluate_run(
    manifest: &Manifest,
    submissions: impl AsRef<Path>,
    kind: TaskKind,
    cfg: &EvalConfig,
) -> Result<EvaluationReport, BenchError> {
    cfg.validate()?;
    let submissions = submissions.as_ref();
    if !submissions.is_dir() {
        return Err(BenchError::io(
            submissions,
            std::io::Error::new(std::io::ErrorKind::NotFound, "submissions directory not found"),
        ));
    }
    let mut tasks: Vec<&TaskEntry> = manifest.tasks.iter().collect();
    tasks.sort_by(|a, b| a.task_id.cmp(&b.task_id));
    let records: Vec<TaskRecord> = tasks
        .into_iter()
        .map(|t| {
            if kind.produces_program() {
                program_record(t, submissions, kind, cfg)
            } else {
                text_record(t, submissions, kind, cfg)
            }
        })
        .collect();
    Ok(EvaluationReport {
        manifest: manifest.name.clone(),
        task_kind: kind,
        aggregates: Aggregates::from_records(&records, &cfg.bleu),
        config: cfg.clone(),
        tasks: records,
    })
}

/// Write the manifest's own gold outputs as a submission set: gold programs
/// for program tasks, reference text for text tasks.
pub fn write_reference_submissions(
    manifest: &Manifest,
    dest: impl AsRef<Path>,
    kind: TaskKind,
    field: ReferenceField,
) -> Result<(), BenchError> {
    let dest = dest.as_ref();
    fs::create_dir_all(dest).map_err(|e| BenchError::io(dest, e))?;
    for task in &manifest.tasks {
        let path = submission_path(dest, task, kind);
        let contents = if kind.produces_program() {
            lang::serialize(&task.gold)
        } else {
            format!("{}\n", field.text(task))
        };
        fs::write(&path, contents).map_err(|e| BenchError::io(&path, e))?;
    }
    Ok(())
}
