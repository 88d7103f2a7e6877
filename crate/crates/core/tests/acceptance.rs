//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line regardless of capture flags.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use ipa_eval::ir::BoundingBox;
use ipa_eval::lang::{parse, serialize};
use ipa_eval::metrics::{iou, lcs, lcs_len, mpo, mse, sensitive_error, ssim, strict_error, MpoMode, SensitiveErrorConfig};
use ipa_eval::text::{
    bleu, brevity_penalty, modified_precision, tokenize, BleuConfig, ReferenceSet, TextCandidate, ZeroPrecisionPolicy,
};
use ipa_eval::GrayMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    if elapsed > Duration::from_secs(limit_s) {
        return Err(format!("took {elapsed:.2?}, limit {limit_s} s"));
    }
    Ok(())
}

// 1. Reflexivity of strict error, sensitive error and MPO.
fn reflexivity() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = SensitiveErrorConfig::default();
    for i in 0..1000 {
        let p = common::random_process(&mut rng, 20);
        ensure!(strict_error(&p, &p) == 0, "process {i}: strict error nonzero");
        let s = sensitive_error(&p, &p, &cfg);
        ensure!(s.value == 0.0, "process {i}: sensitive error {}", s.value);
        for mode in [MpoMode::Literal, MpoMode::GoldNormalized] {
            let m = mpo(&p, &p, mode);
            ensure!(m == 1.0, "process {i}: mpo({mode}) = {m}");
        }
    }
    within(start.elapsed(), 5)?;
    Ok(format!("1000 processes in {:.2?}", start.elapsed()))
}

/// Sequences over {0,1,2,3} of length 0..=max, longest first.
fn all_sequences(max: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for len in (0..=max).rev() {
        for code in 0..4usize.pow(len as u32) {
            out.push((0..len).map(|k| ((code >> (2 * k)) & 3) as u8).collect());
        }
    }
    out
}

fn seq_code(s: &[u8]) -> usize {
    s.iter().fold(1, |acc, &c| acc * 4 + c as usize)
}

/// Longest common subsequence length by enumerating every subsequence of
/// `x` and testing it against `y` greedily.
fn brute_lcs_len(x: &[u8], y: &[u8]) -> usize {
    let is_subseq = |s: &[u8]| {
        let mut it = y.iter();
        s.iter().all(|c| it.any(|d| d == c))
    };
    (0u32..1 << x.len())
        .filter_map(|mask| {
            let s: Vec<u8> = (0..x.len()).filter(|i| mask >> i & 1 == 1).map(|i| x[i]).collect();
            is_subseq(&s).then_some(s.len())
        })
        .max()
        .unwrap_or(0)
}

fn is_subsequence(s: &[u8], of: &[u8]) -> bool {
    let mut it = of.iter();
    s.iter().all(|c| it.any(|d| d == c))
}

// 2. DP LCS against exhaustive enumeration.
fn lcs_oracle() -> Check {
    let start = Instant::now();
    let universe = all_sequences(6);
    let n = universe.len();
    let words = n.div_ceil(64);
    let mut index = vec![usize::MAX; seq_code(&[3; 6]) + 1];
    for (i, s) in universe.iter().enumerate() {
        index[seq_code(s)] = i;
    }
    // Bit i of a sequence's set marks universe[i] as one of its subsequences.
    // Universe order is longest first, so the lowest common bit is the LCS.
    let sets: Vec<Vec<u64>> = universe
        .iter()
        .map(|s| {
            let mut bits = vec![0u64; words];
            for mask in 0u32..1 << s.len() {
                let sub: Vec<u8> = (0..s.len()).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                let j = index[seq_code(&sub)];
                bits[j / 64] |= 1 << (j % 64);
            }
            bits
        })
        .collect();
    let lens: Vec<usize> = universe.iter().map(Vec::len).collect();

    let mut pairs = 0u64;
    for (a, sa) in universe.iter().zip(&sets) {
        for (b, sb) in universe.iter().zip(&sets) {
            let first = sa.iter().zip(sb).position(|(x, y)| x & y != 0).expect("empty sequence is common");
            let bit = (sa[first] & sb[first]).trailing_zeros() as usize;
            let expected = lens[first * 64 + bit];
            let got = lcs_len(a, b);
            ensure!(got == expected, "lcs_len({a:?}, {b:?}) = {got}, oracle {expected}");
            pairs += 1;
        }
    }
    for a in universe.iter().filter(|s| s.len() <= 4) {
        for b in universe.iter().filter(|s| s.len() <= 4) {
            let l = lcs(a, b);
            ensure!(
                is_subsequence(&l, a) && is_subsequence(&l, b) && l.len() == lcs_len(a, b),
                "lcs({a:?}, {b:?}) = {l:?} is not a longest common subsequence"
            );
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let a: Vec<u8> = (0..rng.gen_range(0..=8)).map(|_| rng.gen_range(0..4)).collect();
        let b: Vec<u8> = (0..rng.gen_range(0..=8)).map(|_| rng.gen_range(0..4)).collect();
        let expected = brute_lcs_len(&a, &b);
        let l = lcs(&a, &b);
        ensure!(lcs_len(&a, &b) == expected, "lcs_len({a:?}, {b:?}) != oracle {expected}");
        ensure!(
            l.len() == expected && is_subsequence(&l, &a) && is_subsequence(&l, &b),
            "lcs({a:?}, {b:?}) = {l:?}, oracle length {expected}"
        );
    }
    within(start.elapsed(), 30)?;
    Ok(format!("{pairs} exhaustive + 10000 random pairs in {:.2?}", start.elapsed()))
}

// 3. IoU hand cases.
fn iou_cases() -> Check {
    let bb = |x0, y0, x1, y1| BoundingBox::new(x0, y0, x1, y1).unwrap();
    let v = iou(&bb(0, 0, 2, 2), &bb(1, 1, 3, 3));
    ensure!(close(v, 1.0 / 7.0, 1e-12), "overlap case {v}");
    let v = iou(&bb(0, 0, 2, 2), &bb(0, 0, 2, 2));
    ensure!(close(v, 1.0, 1e-12), "identical case {v}");
    let v = iou(&bb(0, 0, 2, 2), &bb(5, 5, 7, 7));
    ensure!(close(v, 0.0, 1e-12), "disjoint case {v}");
    Ok("1/7, identical, disjoint".into())
}

// 4. SSIM and MSE hand cases.
fn image_cases() -> Check {
    let cfg = SensitiveErrorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data: Vec<f64> = (0..64).map(|_| f64::from(rng.gen_range(0u8..=255))).collect();
    let img = GrayMatrix::new(8, 8, data).unwrap();
    let v = ssim(&img, &img, &cfg).unwrap();
    ensure!(close(v, 1.0, 1e-9), "ssim identical {v}");
    let black = GrayMatrix::filled(8, 8, 0.0).unwrap();
    let white = GrayMatrix::filled(8, 8, 255.0).unwrap();
    let c1 = (0.01f64 * 255.0).powi(2);
    let v = ssim(&black, &white, &cfg).unwrap();
    ensure!(close(v, c1 / (65025.0 + c1), 1e-9), "ssim black/white {v}");
    let v = mse(&img, &img).unwrap();
    ensure!(v == 0.0, "mse identical {v}");
    Ok(format!("ssim(0, 255) = {:.6e}", c1 / (65025.0 + c1)))
}

// 5. BLEU hand cases.
fn bleu_cases() -> Check {
    let cand = [TextCandidate::new("0", "the the the the the the the")];
    let refs = [ReferenceSet::new("0", &["the cat is on the mat"]).unwrap()];
    let p1 = modified_precision(&cand, &refs, 1).unwrap();
    ensure!(close(p1, 2.0 / 7.0, 1e-12), "clipped p1 {p1}");

    let bp = brevity_penalty(3, 6);
    ensure!(close(bp, (-1.0f64).exp(), 1e-12), "BP(3,6) {bp}");

    let texts = ["click the send button", "open the mail client and write a new message", "type hello"];
    let cands: Vec<_> = texts.iter().enumerate().map(|(i, t)| TextCandidate::new(i.to_string(), t)).collect();
    let refs: Vec<_> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| ReferenceSet::new(i.to_string(), &[*t]).unwrap())
        .collect();
    let s = bleu(&cands, &refs, &BleuConfig::default()).map_err(|e| e.to_string())?;
    ensure!(close(s.score, 1.0, 1e-12), "identity corpus {}", s.score);

    // p = (4/4, 2/3, 1/2, 0 -> 1e-9), BP = exp(1 - 5/4).
    let cfg = BleuConfig::default().with_policy(ZeroPrecisionPolicy::EpsilonSmoothing);
    let cand = [TextCandidate::new("0", "click the send button")];
    let refs = [ReferenceSet::new("0", &["click on the send button"]).unwrap()];
    let s = bleu(&cand, &refs, &cfg).map_err(|e| e.to_string())?;
    let expected = (-0.25f64).exp() * (0.25 * (1.0f64.ln() + (2.0f64 / 3.0).ln() + 0.5f64.ln() + 1e-9f64.ln())).exp();
    ensure!(close(s.score, expected, 1e-9), "hand example {} vs {expected}", s.score);
    ensure!(tokenize("Click the send button.") == tokenize("click the send button"), "tokenizer");
    Ok(format!("hand example {expected:.10}"))
}

fn check_positions(src: &str) -> Result<(), String> {
    match parse(src) {
        Ok(_) => Ok(()),
        Err(diags) => {
            ensure!(!diags.is_empty() && diags.len() <= 100, "{} diagnostics for {src:?}", diags.len());
            let lines: Vec<&str> = src.split('\n').collect();
            for d in &diags {
                ensure!(d.line >= 1 && d.line <= lines.len(), "line {} outside {src:?}", d.line);
                let width = lines[d.line - 1].trim_end_matches('\r').chars().count();
                ensure!(d.column >= 1 && d.column <= width + 1, "column {} outside line of {src:?}", d.column);
            }
            Ok(())
        }
    }
}

// 6. Parser round trip and malformed input.
fn parser_cases() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..10_000 {
        let p = common::random_process(&mut rng, 12);
        let text = serialize(&p);
        match parse(&text) {
            Ok(q) => ensure!(q == p, "process {i} changed in round trip:\n{text}"),
            Err(d) => return Err(format!("process {i} failed to reparse: {}\n{text}", d[0])),
        }
    }
    let malformed = [
        "click(@I1.",
        "click(@I1.submit",
        "click(@I1.submit))",
        "click @I1.submit)",
        "(\"x\")",
        "9click()",
        "type(@I1.box, \"unterminated)",
        "type(@I1.box,, \"x\")",
        "type(@I1.box \"x\")",
        "type(\"a\\q\")",
        "click(@.x)",
        "click(@I1)",
        "img(\"a\"",
        "click(img(\"a\")",
        "click(img(a))",
        "ok()\nbad(\n\n# note\nalso bad)",
        "click(\u{0})",
        "\u{feff}click()",
        "click(1.2.3.4)",
        "click(-)",
    ];
    let mut failures = 0;
    for src in malformed {
        check_positions(src)?;
        if parse(src).is_err() {
            failures += 1;
        }
    }
    ensure!(parse("click(@I1.").is_err_and(|d| d[0].line == 1), "truncated element accepted");
    let many: String = (0..150).map(|_| "bad(\n").collect();
    ensure!(parse(&many).is_err_and(|d| d.len() == 100), "diagnostic cap");

    let mut mutated = 0;
    for _ in 0..3000 {
        let p = common::random_process(&mut rng, 5);
        let mut chars: Vec<char> = serialize(&p).chars().collect();
        match rng.gen_range(0..3) {
            0 if !chars.is_empty() => {
                let at = rng.gen_range(0..chars.len());
                chars.truncate(at);
            }
            1 if !chars.is_empty() => {
                let at = rng.gen_range(0..chars.len());
                chars.remove(at);
            }
            _ => {
                let at = rng.gen_range(0..=chars.len());
                chars.insert(at, ['(', ')', '"', ',', '@', '.', '\\', '\n', 'x', ' '][rng.gen_range(0..10)]);
            }
        }
        let src: String = chars.into_iter().collect();
        check_positions(&src)?;
        mutated += usize::from(parse(&src).is_err());
    }
    Ok(format!(
        "10000 round trips; {failures}/{} fixed and {mutated}/3000 mutated inputs rejected with positions",
        malformed.len()
    ))
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipa-eval")).args(args).output().expect("run ipa-eval")
}

fn run_ok(args: &[&str]) -> Result<Output, String> {
    let out = cli(args);
    ensure!(
        out.status.success(),
        "ipa-eval {} exited {:?}: {}",
        args.join(" "),
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out)
}

/// Generate, validate and score one fixture set under `dir`. Returns the
/// JSON and CSV reports for the program and text runs.
fn fixture_run(dir: &Path) -> Result<Vec<Vec<u8>>, String> {
    let fx = dir.join("fixtures");
    let subs = dir.join("submissions");
    let fx_s = fx.to_str().unwrap();
    let subs_s = subs.to_str().unwrap();
    run_ok(&["gen-fixtures", "--seed", "42", "--per-category", "10", "--out", fx_s])?;

    let manifest: Value = serde_json::from_slice(&std::fs::read(fx.join("manifest.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let tasks = manifest["tasks"].as_array().ok_or("manifest without tasks")?;
    ensure!(tasks.len() == 100, "{} tasks", tasks.len());
    let mut counts = std::collections::BTreeMap::new();
    for t in tasks {
        *counts.entry(t["category"].as_str().unwrap_or("").to_string()).or_insert(0) += 1;
    }
    ensure!(counts.len() == 10 && counts.values().all(|&c| c == 10), "category counts {counts:?}");
    let on_disk = std::fs::read_dir(fx.join("tasks")).map_err(|e| e.to_string())?.count();
    ensure!(on_disk == 100, "{on_disk} task directories");

    let out = run_ok(&["validate", "--manifest", fx_s])?;
    ensure!(out.stderr.is_empty(), "validate printed diagnostics: {}", String::from_utf8_lossy(&out.stderr));

    common::gold_submissions(&fx, &subs);
    let mut reports = Vec::new();
    for (task, ext) in [("d2p", "json"), ("d2p", "csv"), ("d2t", "json"), ("d2t", "csv")] {
        let dest = dir.join(format!("{task}.{ext}"));
        run_ok(&[
            "bench", "--manifest", fx_s, "--submissions", subs_s, "--task", task, "--out", dest.to_str().unwrap(), "--format",
            ext,
        ])?;
        reports.push(std::fs::read(&dest).map_err(|e| e.to_string())?);
    }

    let program: Value = serde_json::from_slice(&reports[0]).map_err(|e| e.to_string())?;
    let agg = &program["aggregates"];
    ensure!(agg["mae_strict"] == 0.0, "MAE_strict {}", agg["mae_strict"]);
    ensure!(agg["mean_sensitive"] == 0.0, "mean sensitive {}", agg["mean_sensitive"]);
    ensure!(agg["mean_mpo"] == 1.0, "mean MPO {}", agg["mean_mpo"]);
    for t in program["tasks"].as_array().unwrap() {
        ensure!(t["strict"] == 0 && t["sensitive"] == 0.0 && t["mpo"] == 1.0, "task {} not reflexive", t["task_id"]);
    }
    let text: Value = serde_json::from_slice(&reports[2]).map_err(|e| e.to_string())?;
    ensure!(text["aggregates"]["bleu"]["score"] == 1.0, "BLEU {}", text["aggregates"]["bleu"]["score"]);
    let csv_rows = String::from_utf8_lossy(&reports[1]).lines().count();
    ensure!(csv_rows == 1 + 300, "{csv_rows} CSV lines for d2p");
    Ok(reports)
}

// 7. Synthetic benchmark end to end through the CLI.
fn fixture_round_trip() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    fixture_run(dir.path())?;
    within(start.elapsed(), 60)?;
    Ok(format!("100 tasks, MAE_strict 0, MPO 1, BLEU 1 in {:.2?}", start.elapsed()))
}

// 8. Byte-identical repeat of criterion 7.
fn determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ra = fixture_run(a.path())?;
    let rb = fixture_run(b.path())?;
    let ta = common::read_tree(&a.path().join("fixtures"));
    let tb = common::read_tree(&b.path().join("fixtures"));
    ensure!(ta.len() == tb.len(), "fixture trees differ in size: {} vs {}", ta.len(), tb.len());
    for ((pa, ca), (pb, cb)) in ta.iter().zip(&tb) {
        ensure!(pa == pb && ca == cb, "fixture file {} differs", pa.display());
    }
    ensure!(ra == rb, "reports differ between runs");
    Ok(format!("{} fixture files and 4 reports identical", ta.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("metric reflexivity", reflexivity),
        ("LCS oracle equivalence", lcs_oracle),
        ("IoU hand cases", iou_cases),
        ("SSIM/MSE hand cases", image_cases),
        ("BLEU hand cases", bleu_cases),
        ("parser round trip and diagnostics", parser_cases),
        ("fixture round trip", fixture_round_trip),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    println!("\nrunning {} acceptance criteria", criteria.len());
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed\n", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
