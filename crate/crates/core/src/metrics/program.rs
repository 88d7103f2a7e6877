use std::collections::BTreeSet;
use std::fmt;
use std::slice;

use serde::{Deserialize, Serialize};

use crate::ir::{encode_processes, Argument, ElementRef, Process, ProgramCorpus, Symbol};

use super::{image_arg_error, lcs, MetricError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageComparator {
    #[default]
    Iou,
    Mse,
    Ssim,
}

impl fmt::Display for ImageComparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageComparator::Iou => "iou",
            ImageComparator::Mse => "mse",
            ImageComparator::Ssim => "ssim",
        })
    }
}

/// Thresholds and comparator used to score image arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitiveErrorConfig {
    pub iou_threshold: f64,
    pub image_comparator: ImageComparator,
    pub mse_threshold: f64,
    pub ssim_threshold: f64,
    pub ssim_k1: f64,
    pub ssim_k2: f64,
    pub ssim_dynamic_range: f64,
}

impl Default for SensitiveErrorConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            image_comparator: ImageComparator::Iou,
            mse_threshold: 100.0,
            ssim_threshold: 0.95,
            ssim_k1: 0.01,
            ssim_k2: 0.03,
            ssim_dynamic_range: 255.0,
        }
    }
}

impl SensitiveErrorConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        let bad = |what: &str| Err(MetricError::InvalidConfig(what.to_string()));
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return bad("iou_threshold must lie in (0, 1]");
        }
        if !(self.mse_threshold >= 0.0) {
            return bad("mse_threshold must be non-negative");
        }
        if !(self.ssim_threshold > -1.0 && self.ssim_threshold <= 1.0) {
            return bad("ssim_threshold must lie in (-1, 1]");
        }
        if !(self.ssim_k1 > 0.0 && self.ssim_k2 > 0.0 && self.ssim_dynamic_range > 0.0) {
            return bad("ssim constants must be positive");
        }
        Ok(())
    }
}

/// 0 when the two programs are statement-for-statement identical.
pub fn strict_error(p: &Process, gold: &Process) -> u8 {
    u8::from(p.statements != gold.statements)
}

pub fn pred_error(action: &str, gold: &str) -> u8 {
    u8::from(action != gold)
}

pub fn symb_arg_error(value: &str, gold: &str) -> u8 {
    u8::from(value != gold)
}

pub fn element_arg_error(element: &ElementRef, gold: &ElementRef) -> u8 {
    u8::from(element != gold)
}

/// Error of one aligned argument pair and whether an image comparison had to
/// fall back to comparing paths.
fn arg_error(arg: &Argument, gold: &Argument, cfg: &SensitiveErrorConfig) -> (u8, bool) {
    match (arg, gold) {
        (Argument::Element(a), Argument::Element(b)) => (element_arg_error(a, b), false),
        (Argument::Symbol(a), Argument::Symbol(b)) => (symb_arg_error(a, b), false),
        (Argument::Image(a), Argument::Image(b)) => match image_arg_error(a, b, cfg) {
            Ok(e) => (e, false),
            Err(MetricError::MissingImageData { .. }) => (u8::from(a.path() != b.path()), true),
            Err(_) => (1, false),
        },
        _ => (1, false),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    Paired,
    CandidateOnly,
    GoldOnly,
}

/// Per-position unit errors. A statement contributes one predicate unit plus
/// one unit per argument position on the longer side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementBreakdown {
    pub index: usize,
    pub alignment: Alignment,
    pub predicate_error: u8,
    pub argument_errors: Vec<u8>,
    /// Image arguments compared by path for lack of boxes or pixels.
    pub image_fallbacks: usize,
}

impl StatementBreakdown {
    pub fn units(&self) -> usize {
        1 + self.argument_errors.len()
    }

    pub fn error_units(&self) -> usize {
        usize::from(self.predicate_error) + self.argument_errors.iter().map(|&e| usize::from(e)).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitiveError {
    pub value: f64,
    pub error_units: usize,
    pub total_units: usize,
    pub breakdown: Vec<StatementBreakdown>,
}

/// Predicate/argument sensitive error with positional alignment.
///
/// Errors are counted per unit (predicates and arguments); the normaliser is
/// the gold program's unit count plus whatever the candidate has beyond it at
/// aligned positions or in surplus statements.
pub fn sensitive_error(p: &Process, gold: &Process, cfg: &SensitiveErrorConfig) -> SensitiveError {
    let len = p.len().max(gold.len());
    let mut breakdown = Vec::with_capacity(len);
    for index in 0..len {
        let entry = match (p.statements.get(index), gold.statements.get(index)) {
            (Some(c), Some(g)) => {
                let width = c.arity().max(g.arity());
                let mut argument_errors = Vec::with_capacity(width);
                let mut image_fallbacks = 0;
                for k in 0..width {
                    let e = match (c.args.get(k), g.args.get(k)) {
                        (Some(a), Some(b)) => {
                            let (e, fell_back) = arg_error(a, b, cfg);
                            image_fallbacks += usize::from(fell_back);
                            e
                        }
                        _ => 1,
                    };
                    argument_errors.push(e);
                }
                StatementBreakdown {
                    index,
                    alignment: Alignment::Paired,
                    predicate_error: pred_error(c.action(), g.action()),
                    argument_errors,
                    image_fallbacks,
                }
            }
            (Some(s), None) | (None, Some(s)) => StatementBreakdown {
                index,
                alignment: if index < p.len() {
                    Alignment::CandidateOnly
                } else {
                    Alignment::GoldOnly
                },
                predicate_error: 1,
                argument_errors: vec![1; s.arity()],
                image_fallbacks: 0,
            },
            (None, None) => unreachable!("index below the longer length"),
        };
        breakdown.push(entry);
    }

    let error_units: usize = breakdown.iter().map(StatementBreakdown::error_units).sum();
    let total_units: usize = breakdown.iter().map(StatementBreakdown::units).sum();
    let value = if total_units == 0 {
        0.0
    } else {
        error_units as f64 / total_units as f64
    };
    SensitiveError {
        value,
        error_units,
        total_units,
        breakdown,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MpoMode {
    /// Divide by the candidate sequence length.
    #[default]
    Literal,
    /// Divide by the gold sequence length.
    GoldNormalized,
}

impl fmt::Display for MpoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MpoMode::Literal => "literal",
            MpoMode::GoldNormalized => "gold_normalized",
        })
    }
}

fn mpo_symbols(candidate: &[Symbol], gold: &[Symbol], mode: MpoMode) -> f64 {
    if candidate.is_empty() && gold.is_empty() {
        return 1.0;
    }
    let denom = match mode {
        MpoMode::Literal => candidate.len(),
        MpoMode::GoldNormalized => gold.len(),
    };
    if denom == 0 {
        return 0.0;
    }
    lcs(candidate, gold).len() as f64 / denom as f64
}

/// Maximum program overlap of one program pair.
pub fn mpo(p: &Process, gold: &Process, mode: MpoMode) -> f64 {
    let enc = encode_processes(slice::from_ref(p), slice::from_ref(gold));
    mpo_symbols(&enc.candidate[0], &enc.gold[0], mode)
}

/// Pair programs by id, in gold order.
pub fn pair_corpora<'a>(
    candidates: &'a ProgramCorpus,
    golds: &'a ProgramCorpus,
) -> Result<Vec<(&'a Process, &'a Process)>, MetricError> {
    let cand_ids: BTreeSet<&str> = candidates.ids().collect();
    let gold_ids: BTreeSet<&str> = golds.ids().collect();
    if cand_ids != gold_ids {
        return Err(MetricError::IdMismatch {
            missing_candidates: gold_ids.difference(&cand_ids).map(|s| s.to_string()).collect(),
            missing_gold: cand_ids.difference(&gold_ids).map(|s| s.to_string()).collect(),
        });
    }
    if golds.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    Ok(golds
        .programs()
        .iter()
        .map(|g| {
            let id = g.id.as_deref().expect("corpus programs carry ids");
            (candidates.get(id).expect("id sets are equal"), g)
        })
        .collect())
}

/// Mean strict error over id-paired programs.
pub fn mae_strict(candidates: &ProgramCorpus, golds: &ProgramCorpus) -> Result<f64, MetricError> {
    let pairs = pair_corpora(candidates, golds)?;
    let total: u32 = pairs.iter().map(|(c, g)| u32::from(strict_error(c, g))).sum();
    Ok(f64::from(total) / pairs.len() as f64)
}

pub fn mean_sensitive_error(
    candidates: &ProgramCorpus,
    golds: &ProgramCorpus,
    cfg: &SensitiveErrorConfig,
) -> Result<f64, MetricError> {
    let pairs = pair_corpora(candidates, golds)?;
    let total: f64 = pairs.iter().map(|(c, g)| sensitive_error(c, g, cfg).value).sum();
    Ok(total / pairs.len() as f64)
}

/// Corpus MPO: both corpora are encoded over one shared symbol table, then
/// per-program overlaps are averaged.
pub fn mpo_corpus(candidates: &ProgramCorpus, golds: &ProgramCorpus, mode: MpoMode) -> Result<f64, MetricError> {
    let pairs = pair_corpora(candidates, golds)?;
    let (cands, golds): (Vec<Process>, Vec<Process>) = pairs.into_iter().map(|(c, g)| (c.clone(), g.clone())).unzip();
    let enc = encode_processes(&cands, &golds);
    let total: f64 = enc
        .candidate
        .iter()
        .zip(&enc.gold)
        .map(|(c, g)| mpo_symbols(c, g, mode))
        .sum();
    Ok(total / enc.gold.len() as f64)
}

/// All program metrics for one candidate/gold pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramPairResult {
    pub strict: u8,
    pub sensitive: f64,
    pub mpo: f64,
    pub unit_breakdown: Vec<StatementBreakdown>,
}

pub fn evaluate_pair(p: &Process, gold: &Process, cfg: &SensitiveErrorConfig, mode: MpoMode) -> ProgramPairResult {
    let sensitive = sensitive_error(p, gold, cfg);
    ProgramPairResult {
        strict: strict_error(p, gold),
        sensitive: sensitive.value,
        mpo: mpo(p, gold, mode),
        unit_breakdown: sensitive.breakdown,
    }
}

/// Per-id results in gold order.
pub fn evaluate_corpora(
    candidates: &ProgramCorpus,
    golds: &ProgramCorpus,
    cfg: &SensitiveErrorConfig,
    mode: MpoMode,
) -> Result<Vec<(String, ProgramPairResult)>, MetricError> {
    cfg.validate()?;
    Ok(pair_corpora(candidates, golds)?
        .into_iter()
        .map(|(c, g)| (g.id.clone().unwrap_or_default(), evaluate_pair(c, g, cfg, mode)))
        .collect())
}
