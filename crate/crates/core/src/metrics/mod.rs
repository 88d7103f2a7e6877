//! Program-comparison metrics: strict and sensitive error, image argument
//! comparison, and LCS-based maximum program overlap.

mod image;
mod lcs;
mod program;

use thiserror::Error;

pub use self::image::{image_arg_error, iou, mse, ssim};
pub use self::lcs::{lcs, lcs_len};
pub use self::program::{
    element_arg_error, evaluate_corpora, evaluate_pair, mae_strict, mean_sensitive_error, mpo, mpo_corpus,
    pair_corpora, pred_error, sensitive_error, strict_error, symb_arg_error, Alignment, ImageComparator,
    MpoMode, ProgramPairResult, SensitiveError, SensitiveErrorConfig, StatementBreakdown,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("corpus ids do not match: missing from candidates {missing_candidates:?}, missing from gold {missing_gold:?}")]
    IdMismatch {
        missing_candidates: Vec<String>,
        missing_gold: Vec<String>,
    },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("image dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{comparator} comparison needs {what} on both images")]
    MissingImageData {
        comparator: ImageComparator,
        what: &'static str,
    },
    #[error("invalid metric configuration: {0}")]
    InvalidConfig(String),
}
