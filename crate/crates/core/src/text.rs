//! Corpus BLEU for generated process descriptions: clipped n-gram precision,
//! brevity penalty, and a weighted geometric mean.
//!
//! Text is lowercased, split on whitespace, and trailing `.,!?;` are stripped
//! from each token. The effective reference length of a candidate is the
//! length of its closest reference, preferring the shorter one on ties.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("candidate and reference ids do not match: missing references for {missing_references:?}, missing candidates for {missing_candidates:?}")]
    IdMismatch {
        missing_references: Vec<String>,
        missing_candidates: Vec<String>,
    },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("reference set {0:?} is empty")]
    EmptyReferences(String),
    #[error("invalid BLEU configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Jsonl { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const TRAILING_PUNCT: &[char] = &['.', ',', '!', '?', ';'];

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.to_lowercase().trim_end_matches(TRAILING_PUNCT).to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextCandidate {
    pub id: String,
    pub tokens: Vec<String>,
}

impl TextCandidate {
    pub fn new(id: impl Into<String>, text: &str) -> Self {
        Self {
            id: id.into(),
            tokens: tokenize(text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceSet {
    pub id: String,
    pub references: Vec<Vec<String>>,
}

impl ReferenceSet {
    pub fn new<S: AsRef<str>>(id: impl Into<String>, texts: &[S]) -> Result<Self, TextError> {
        let id = id.into();
        if texts.is_empty() {
            return Err(TextError::EmptyReferences(id));
        }
        Ok(Self {
            id,
            references: texts.iter().map(|t| tokenize(t.as_ref())).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPrecisionPolicy {
    /// Any zero precision makes the score zero.
    #[default]
    ScoreZero,
    /// Zero precisions are replaced by `epsilon` before taking the log.
    EpsilonSmoothing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_n: usize,
    pub weights: Vec<f64>,
    pub zero_precision_policy: ZeroPrecisionPolicy,
    pub epsilon: f64,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self::uniform(4)
    }
}

impl BleuConfig {
    pub fn uniform(max_n: usize) -> Self {
        Self {
            max_n,
            weights: vec![1.0 / max_n as f64; max_n],
            zero_precision_policy: ZeroPrecisionPolicy::ScoreZero,
            epsilon: 1e-9,
        }
    }

    pub fn with_policy(mut self, policy: ZeroPrecisionPolicy) -> Self {
        self.zero_precision_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<(), TextError> {
        let bad = |m: String| Err(TextError::InvalidConfig(m));
        if self.max_n == 0 {
            return bad("max_n must be at least 1".into());
        }
        if self.weights.len() != self.max_n {
            return bad(format!("{} weights for max_n {}", self.weights.len(), self.max_n));
        }
        if self.weights.iter().any(|w| !(*w > 0.0)) {
            return bad("weights must be positive".into());
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return bad(format!("weights sum to {sum}, not 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)".into());
        }
        Ok(())
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped matches and total candidate n-grams of one order.
fn clipped_counts(candidate: &[String], references: &[Vec<String>], n: usize) -> (u64, u64) {
    let cand = ngram_counts(candidate, n);
    let mut max_ref: HashMap<&[String], u64> = HashMap::new();
    for r in references {
        for (gram, count) in ngram_counts(r, n) {
            let slot = max_ref.entry(gram).or_insert(0);
            *slot = (*slot).max(count);
        }
    }
    let matches = cand
        .iter()
        .map(|(gram, &count)| count.min(max_ref.get(gram).copied().unwrap_or(0)))
        .sum();
    (matches, cand.values().sum())
}

/// Length of the reference closest in length to the candidate; shorter wins
/// ties.
pub fn closest_ref_len(candidate_len: usize, references: &[Vec<String>]) -> usize {
    references
        .iter()
        .map(Vec::len)
        .min_by_key(|&r| (r.abs_diff(candidate_len), r))
        .unwrap_or(0)
}

/// Additive sufficient statistics for corpus BLEU.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramStats {
    pub matches: Vec<u64>,
    pub totals: Vec<u64>,
    pub candidate_len: u64,
    pub reference_len: u64,
}

impl NgramStats {
    pub fn zeros(max_n: usize) -> Self {
        Self {
            matches: vec![0; max_n],
            totals: vec![0; max_n],
            candidate_len: 0,
            reference_len: 0,
        }
    }

    pub fn for_sentence(candidate: &[String], references: &[Vec<String>], max_n: usize) -> Self {
        let (matches, totals) = (1..=max_n).map(|n| clipped_counts(candidate, references, n)).unzip();
        Self {
            matches,
            totals,
            candidate_len: candidate.len() as u64,
            reference_len: closest_ref_len(candidate.len(), references) as u64,
        }
    }

    pub fn add(&mut self, other: &NgramStats) {
        for (a, b) in self.matches.iter_mut().zip(&other.matches) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            *a += b;
        }
        self.candidate_len += other.candidate_len;
        self.reference_len += other.reference_len;
    }

    /// Modified precision of order `n` (1-based); 0 when there are no
    /// candidate n-grams.
    pub fn precision(&self, n: usize) -> f64 {
        match self.totals.get(n - 1) {
            Some(&t) if t > 0 => self.matches[n - 1] as f64 / t as f64,
            _ => 0.0,
        }
    }
}

/// `1` when `c > r`, else `exp(1 - r/c)`; `c = 0` gives 0 (or 1 if `r` is 0
/// too).
pub fn brevity_penalty(c: usize, r: usize) -> f64 {
    if c > r {
        1.0
    } else if c == 0 {
        if r == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - r as f64 / c as f64).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    pub score: f64,
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub candidate_len: u64,
    pub reference_len: u64,
}

impl fmt::Display for BleuScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.precisions.iter().map(|p| format!("{p:.4}")).collect();
        write!(
            f,
            "BLEU = {:.6} (p = {}; BP = {:.4}; c = {}, r = {})",
            self.score,
            ps.join("/"),
            self.brevity_penalty,
            self.candidate_len,
            self.reference_len
        )
    }
}

/// Combine accumulated statistics into a score. `cfg` must be valid.
///
/// Orders with no candidate n-grams at all (candidates shorter than `n`)
/// are left out of the geometric mean and the remaining weights rescaled,
/// so a short candidate equal to its reference still scores 1. The reported
/// precision for such an order stays 0.
pub fn bleu_from_stats(stats: &NgramStats, cfg: &BleuConfig) -> BleuScore {
    let precisions: Vec<f64> = (1..=cfg.max_n).map(|n| stats.precision(n)).collect();
    let bp = brevity_penalty(stats.candidate_len as usize, stats.reference_len as usize);
    let effective: Vec<(f64, f64)> = precisions
        .iter()
        .zip(&cfg.weights)
        .zip(&stats.totals)
        .filter(|(_, &total)| total > 0)
        .map(|((&p, &w), _)| (p, w))
        .collect();
    let weight_sum: f64 = effective.iter().map(|(_, w)| w).sum();
    let any_zero = effective.iter().any(|&(p, _)| p == 0.0);
    let score_zero = any_zero && cfg.zero_precision_policy == ZeroPrecisionPolicy::ScoreZero;
    let score = if effective.is_empty() || weight_sum <= 0.0 || score_zero {
        0.0
    } else {
        let log_sum: f64 = effective
            .iter()
            .map(|&(p, w)| w / weight_sum * if p == 0.0 { cfg.epsilon } else { p }.ln())
            .sum();
        bp * log_sum.exp()
    };
    BleuScore {
        score,
        precisions,
        brevity_penalty: bp,
        candidate_len: stats.candidate_len,
        reference_len: stats.reference_len,
    }
}

/// Pair candidates with reference sets by id, in candidate order.
pub fn align<'a>(
    candidates: &'a [TextCandidate],
    references: &'a [ReferenceSet],
) -> Result<Vec<(&'a TextCandidate, &'a ReferenceSet)>, TextError> {
    let mut by_id = HashMap::new();
    for r in references {
        if r.references.is_empty() {
            return Err(TextError::EmptyReferences(r.id.clone()));
        }
        if by_id.insert(r.id.as_str(), r).is_some() {
            return Err(TextError::DuplicateId(r.id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for c in candidates {
        if !seen.insert(c.id.as_str()) {
            return Err(TextError::DuplicateId(c.id.clone()));
        }
    }
    let ref_ids: BTreeSet<&str> = by_id.keys().copied().collect();
    if seen != ref_ids {
        return Err(TextError::IdMismatch {
            missing_references: seen.difference(&ref_ids).map(|s| s.to_string()).collect(),
            missing_candidates: ref_ids.difference(&seen).map(|s| s.to_string()).collect(),
        });
    }
    Ok(candidates.iter().map(|c| (c, by_id[c.id.as_str()])).collect())
}

pub fn corpus_stats(
    candidates: &[TextCandidate],
    references: &[ReferenceSet],
    max_n: usize,
) -> Result<NgramStats, TextError> {
    let mut total = NgramStats::zeros(max_n);
    for (c, r) in align(candidates, references)? {
        total.add(&NgramStats::for_sentence(&c.tokens, &r.references, max_n));
    }
    Ok(total)
}

/// Corpus-level modified n-gram precision of order `n`.
pub fn modified_precision(candidates: &[TextCandidate], references: &[ReferenceSet], n: usize) -> Result<f64, TextError> {
    if n == 0 {
        return Err(TextError::InvalidConfig("n-gram order must be at least 1".into()));
    }
    Ok(corpus_stats(candidates, references, n)?.precision(n))
}

/// Corpus BLEU: statistics are pooled over all candidates before combining.
pub fn bleu(candidates: &[TextCandidate], references: &[ReferenceSet], cfg: &BleuConfig) -> Result<BleuScore, TextError> {
    cfg.validate()?;
    Ok(bleu_from_stats(&corpus_stats(candidates, references, cfg.max_n)?, cfg))
}

/// BLEU of a single candidate against its references.
pub fn sentence_bleu(candidate: &[String], references: &[Vec<String>], cfg: &BleuConfig) -> Result<BleuScore, TextError> {
    cfg.validate()?;
    Ok(bleu_from_stats(&NgramStats::for_sentence(candidate, references, cfg.max_n), cfg))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonId {
    Str(String),
    Num(serde_json::Number),
}

impl JsonId {
    fn into_string(self) -> String {
        match self {
            JsonId::Str(s) => s,
            JsonId::Num(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
struct CandidateRecord {
    id: JsonId,
    candidate: String,
}

#[derive(Deserialize)]
struct ReferenceRecord {
    id: JsonId,
    references: Vec<String>,
}

fn jsonl_records<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, TextError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| TextError::Jsonl {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Parse `{"id": ..., "candidate": "..."}` lines.
pub fn parse_candidates_jsonl(text: &str) -> Result<Vec<TextCandidate>, TextError> {
    Ok(jsonl_records::<CandidateRecord>(text)?
        .into_iter()
        .map(|r| TextCandidate::new(r.id.into_string(), &r.candidate))
        .collect())
}

/// Parse `{"id": ..., "references": ["...", ...]}` lines.
pub fn parse_references_jsonl(text: &str) -> Result<Vec<ReferenceSet>, TextError> {
    jsonl_records::<ReferenceRecord>(text)?
        .into_iter()
        .map(|r| ReferenceSet::new(r.id.into_string(), &r.references))
        .collect()
}

pub fn load_candidates(path: impl AsRef<Path>) -> Result<Vec<TextCandidate>, TextError> {
    parse_candidates_jsonl(&std::fs::read_to_string(path)?)
}

pub fn load_references(path: impl AsRef<Path>) -> Result<Vec<ReferenceSet>, TextError> {
    parse_references_jsonl(&std::fs::read_to_string(path)?)
}
