//! Process representation, a textual realisation language, and evaluation
//! metrics for intelligent process automation.
//!
//! - [`ir`]: interfaces, arguments, statements, processes, corpora.
//! - [`lang`]: the `.ipa` line language (parser and serializer).
//! - [`env`]: environments, process validation, mock replay.
//! - [`metrics`]: strict/sensitive error, IoU/MSE/SSIM, LCS and MPO.
//! - [`text`]: corpus and sentence BLEU.
//! - [`bench`]: benchmark manifests, fixture generation, evaluation runs and
//!   reports.

pub mod bench;
pub mod env;
pub mod ir;
pub mod lang;
pub mod metrics;
pub mod text;

pub use env::{validate_process, replay, Environment};
pub use ir::{Argument, BoundingBox, ElementRef, GrayMatrix, ImageRef, Process, ProgramCorpus, Statement};
pub use lang::{parse, serialize};
