//! Generate a synthetic benchmark, submit slightly damaged gold programs
//! and write both report formats.
//!
//! `cargo run --example benchmark_run -- [output dir]`

use std::fs;
use std::path::PathBuf;

use ipa_eval::bench::{evaluate_run, generate_fixtures, load_manifest, write_report, EvalConfig, ReportFormat, TaskKind};
use ipa_eval::lang::serialize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("ipa-eval-demo"));
    let fixtures = out.join("fixtures");
    let submissions = out.join("submissions");
    let _ = fs::remove_dir_all(&out);

    let summary = generate_fixtures(42, 2, &fixtures)?;
    println!("{}: {} tasks", summary.name, summary.task_ids.len());
    let manifest = load_manifest(&fixtures).map_err(|d| format!("{} diagnostics, first: {}", d.len(), d[0]))?;
    for (category, n) in manifest.category_counts() {
        println!("  {category:<32} {n}");
    }

    // Every third task drops its last statement; the rest are exact copies.
    fs::create_dir_all(&submissions)?;
    for (i, task) in manifest.tasks.iter().enumerate() {
        let mut program = task.gold.clone();
        if i % 3 == 0 {
            program.statements.pop();
        }
        fs::write(submissions.join(format!("{}.ipa", task.task_id)), serialize(&program))?;
    }

    let report = evaluate_run(&manifest, &submissions, TaskKind::D2P, &EvalConfig::default())?;
    let a = &report.aggregates;
    println!(
        "MAE_strict {:.3}  sensitive {:.3}  MPO {:.3}",
        a.mae_strict.unwrap(),
        a.mean_sensitive.unwrap(),
        a.mean_mpo.unwrap()
    );
    write_report(&report, ReportFormat::Json, out.join("report.json"))?;
    write_report(&report, ReportFormat::Csv, out.join("report.csv"))?;
    println!("reports written to {}", out.display());
    Ok(())
}
