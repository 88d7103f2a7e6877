use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BenchError, EvaluationReport, TaskRecord};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format '{s}'")),
        }
    }
}

fn metric_rows(record: &TaskRecord) -> Vec<(&'static str, Option<f64>)> {
    if record.task_kind.produces_program() {
        vec![
            ("strict", record.strict.map(f64::from)),
            ("sensitive", record.sensitive),
            ("mpo", record.mpo),
        ]
    } else {
        vec![("bleu", record.bleu)]
    }
}

fn render_csv(report: &EvaluationReport) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| BenchError::Serialize(e.to_string());
    w.write_record(["task_id", "category", "task_kind", "metric", "value", "status"])
        .map_err(ser)?;
    for r in &report.tasks {
        let status = serde_json::to_value(r.status).expect("status serializes");
        let status = status.as_str().unwrap_or_default();
        for (metric, value) in metric_rows(r) {
            let value = value.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                r.task_id.as_str(),
                r.category.as_str(),
                r.task_kind.as_str(),
                metric,
                value.as_str(),
                status,
            ])
            .map_err(ser)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Serialize(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

/// Render a report. JSON is the full nested report; CSV has one row per
/// (task, metric). Output depends only on the report's contents.
pub fn render_report(report: &EvaluationReport, format: ReportFormat) -> Result<String, BenchError> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| BenchError::Serialize(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => render_csv(report),
    }
}

pub fn write_report(report: &EvaluationReport, format: ReportFormat, dest: impl AsRef<Path>) -> Result<(), BenchError> {
    let dest = dest.as_ref();
    let text = render_report(report, format)?;
    if let Some(parent) = dest.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| BenchError::io(parent, e))?;
    }
    fs::write(dest, text).map_err(|e| BenchError::io(dest, e))
}
