use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ipa_eval::bench::{self, EvalConfig, ReferenceField, ReportFormat, SubmissionStatus, TaskKind};
use ipa_eval::lang::{self, FILE_EXTENSION};
use ipa_eval::metrics::{self, ImageComparator, MpoMode, SensitiveErrorConfig};
use ipa_eval::text::{self, BleuConfig, ZeroPrecisionPolicy};
use ipa_eval::{Process, ProgramCorpus};

#[derive(Parser)]
#[command(name = "ipa-eval", version, about = "Evaluate process automation outputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score candidate programs against gold programs. Each path is a single
    /// program file or a directory of `<id>.ipa` files.
    Program {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "strict,sensitive,mpo")]
        metrics: Vec<ProgramMetric>,
        #[arg(long, default_value = "literal")]
        mpo_mode: MpoArg,
        #[arg(long, default_value = "iou")]
        image_comparator: ComparatorArg,
    },
    /// Corpus BLEU of JSONL candidates against JSONL references.
    Text {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        references: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=16))]
        max_n: u8,
        #[arg(long, default_value = "zero")]
        smoothing: SmoothingArg,
    },
    /// Evaluate a submissions directory against a benchmark manifest.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        submissions: PathBuf,
        #[arg(long)]
        task: TaskArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "json")]
        format: FormatArg,
        #[arg(long, default_value = "steps")]
        reference_field: FieldArg,
        #[arg(long, default_value = "literal")]
        mpo_mode: MpoArg,
        #[arg(long, default_value = "iou")]
        image_comparator: ComparatorArg,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=16))]
        max_n: u8,
        #[arg(long, default_value = "zero")]
        smoothing: SmoothingArg,
    },
    /// Generate a seeded synthetic benchmark.
    GenFixtures {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        per_category: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Load a benchmark and report every problem found.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum ProgramMetric {
    Strict,
    Sensitive,
    Mpo,
}

#[derive(Clone, Copy, ValueEnum)]
enum MpoArg {
    Literal,
    Gold,
}

impl From<MpoArg> for MpoMode {
    fn from(a: MpoArg) -> Self {
        match a {
            MpoArg::Literal => MpoMode::Literal,
            MpoArg::Gold => MpoMode::GoldNormalized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ComparatorArg {
    Iou,
    Mse,
    Ssim,
}

impl From<ComparatorArg> for ImageComparator {
    fn from(a: ComparatorArg) -> Self {
        match a {
            ComparatorArg::Iou => ImageComparator::Iou,
            ComparatorArg::Mse => ImageComparator::Mse,
            ComparatorArg::Ssim => ImageComparator::Ssim,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SmoothingArg {
    Zero,
    Epsilon,
}

impl SmoothingArg {
    fn bleu(self, max_n: u8) -> BleuConfig {
        BleuConfig::uniform(max_n.into()).with_policy(match self {
            SmoothingArg::Zero => ZeroPrecisionPolicy::ScoreZero,
            SmoothingArg::Epsilon => ZeroPrecisionPolicy::EpsilonSmoothing,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    D2p,
    T2p,
    D2t,
    P2t,
}

impl From<TaskArg> for TaskKind {
    fn from(a: TaskArg) -> Self {
        match a {
            TaskArg::D2p => TaskKind::D2P,
            TaskArg::T2p => TaskKind::T2P,
            TaskArg::D2t => TaskKind::D2T,
            TaskArg::P2t => TaskKind::P2T,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Steps,
    Summary,
}

/// A failure reported to the user with exit code 1.
struct Failure(Vec<String>);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(vec![e.to_string()])
    }
}

fn read_program(path: &Path) -> Result<Process, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    lang::parse(&text).map_err(|diags| Failure(diags.iter().map(|d| format!("{}:{d}", path.display())).collect()))
}

/// A single file becomes a one-program corpus with id "0"; a directory
/// contributes every `*.ipa` file, keyed by file stem.
fn read_corpus(path: &Path) -> Result<ProgramCorpus, Failure> {
    let mut programs = Vec::new();
    let mut errors = Vec::new();
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| format!("{}: {e}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == FILE_EXTENSION))
            .collect();
        files.sort();
        for file in files {
            let id = file.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            match read_program(&file) {
                Ok(p) => programs.push(p.with_id(id)),
                Err(Failure(msgs)) => errors.extend(msgs),
            }
        }
    } else {
        programs.push(read_program(path)?.with_id("0"));
    }
    if !errors.is_empty() {
        return Err(Failure(errors));
    }
    Ok(ProgramCorpus::new(programs)?)
}

fn run_program(
    candidate: &Path,
    gold: &Path,
    metrics_wanted: &[ProgramMetric],
    mode: MpoMode,
    comparator: ImageComparator,
) -> Result<(), Failure> {
    let cfg = SensitiveErrorConfig {
        image_comparator: comparator,
        ..Default::default()
    };
    let candidates = read_corpus(candidate)?;
    let golds = read_corpus(gold)?;
    let wanted: BTreeSet<_> = metrics_wanted.iter().copied().collect();
    let pairs = metrics::evaluate_corpora(&candidates, &golds, &cfg, mode)?;

    let mut programs = Vec::new();
    for (id, r) in &pairs {
        let mut entry = json!({ "id": id });
        if wanted.contains(&ProgramMetric::Strict) {
            entry["strict"] = json!(r.strict);
        }
        if wanted.contains(&ProgramMetric::Sensitive) {
            entry["sensitive"] = json!(r.sensitive);
        }
        if wanted.contains(&ProgramMetric::Mpo) {
            entry["mpo"] = json!(r.mpo);
        }
        programs.push(entry);
    }
    let n = pairs.len() as f64;
    let mut aggregate = json!({ "programs": pairs.len() });
    if wanted.contains(&ProgramMetric::Strict) {
        aggregate["mae_strict"] = json!(pairs.iter().map(|(_, r)| f64::from(r.strict)).sum::<f64>() / n);
    }
    if wanted.contains(&ProgramMetric::Sensitive) {
        aggregate["mean_sensitive"] = json!(pairs.iter().map(|(_, r)| r.sensitive).sum::<f64>() / n);
    }
    if wanted.contains(&ProgramMetric::Mpo) {
        aggregate["mpo"] = json!(pairs.iter().map(|(_, r)| r.mpo).sum::<f64>() / n);
        aggregate["mpo_mode"] = json!(mode.to_string());
    }
    let out = json!({ "aggregate": aggregate, "per_program": programs });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn run_text(candidates: &Path, references: &Path, cfg: &BleuConfig) -> Result<(), Failure> {
    let cands = text::load_candidates(candidates)?;
    let refs = text::load_references(references)?;
    let score = text::bleu(&cands, &refs, cfg)?;
    println!("{}", serde_json::to_string_pretty(&score)?);
    Ok(())
}

fn load_manifest(root: &Path) -> Result<bench::Manifest, Failure> {
    bench::load_manifest(root).map_err(|diags| Failure(diags.iter().map(|d| format!("{}/{d}", root.display())).collect()))
}

fn run() -> Result<(), Failure> {
    match Cli::parse().command {
        Command::Program {
            candidate,
            gold,
            metrics,
            mpo_mode,
            image_comparator,
        } => run_program(&candidate, &gold, &metrics, mpo_mode.into(), image_comparator.into()),
        Command::Text {
            candidates,
            references,
            max_n,
            smoothing,
        } => run_text(&candidates, &references, &smoothing.bleu(max_n)),
        Command::Bench {
            manifest,
            submissions,
            task,
            out,
            format,
            reference_field,
            mpo_mode,
            image_comparator,
            max_n,
            smoothing,
        } => {
            let m = load_manifest(&manifest)?;
            let cfg = EvalConfig {
                sensitive: SensitiveErrorConfig {
                    image_comparator: image_comparator.into(),
                    ..Default::default()
                },
                mpo_mode: mpo_mode.into(),
                bleu: smoothing.bleu(max_n),
                reference_field: match reference_field {
                    FieldArg::Steps => ReferenceField::Steps,
                    FieldArg::Summary => ReferenceField::Summary,
                },
            };
            let report = bench::evaluate_run(&m, &submissions, task.into(), &cfg)?;
            let format = match format {
                FormatArg::Json => ReportFormat::Json,
                FormatArg::Csv => ReportFormat::Csv,
            };
            bench::write_report(&report, format, &out)?;
            for t in report.tasks.iter().filter(|t| t.status != SubmissionStatus::Ok) {
                for d in &t.diagnostics {
                    eprintln!("{}: {d}", t.task_id);
                }
            }
            let a = &report.aggregates;
            let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
            println!(
                "{} tasks ({} flagged): mae_strict={} sensitive={} mpo={} bleu={}",
                a.tasks,
                a.flagged,
                fmt(a.mae_strict),
                fmt(a.mean_sensitive),
                fmt(a.mean_mpo),
                fmt(a.bleu.as_ref().map(|b| b.score)),
            );
            Ok(())
        }
        Command::GenFixtures {
            seed,
            per_category,
            out,
        } => {
            let summary = bench::generate_fixtures(seed, per_category as usize, &out)?;
            println!("{}: {} tasks written to {}", summary.name, summary.task_ids.len(), out.display());
            Ok(())
        }
        Command::Validate { manifest } => {
            let m = load_manifest(&manifest)?;
            println!("{}: {} tasks, 0 diagnostics", m.name, m.tasks.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(messages)) => {
            for m in messages {
                eprintln!("error: {m}");
            }
            ExitCode::FAILURE
        }
    }
}
