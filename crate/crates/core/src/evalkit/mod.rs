//! Synthetic sources with known ground truth, extraction scoring and
//! result tables.

mod generate;
mod report;
mod score;

pub use generate::{generate_source, FieldGen, FieldSpec, RowFormat, SyntheticSource, SyntheticSourceSpec, TruthRow};
pub use report::{format_report, format_report_jsonl, COLUMNS};
pub use score::{ratio_2dp, score, EvaluationRow, Score};

use crate::dataflow::Record;
use crate::ierel::{apply_wrapper, IerelError, Wrapper};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalkitError {
    #[error("format '{format}' has no placeholder for field '{field}'")]
    MissingPlaceholder { format: String, field: String },
    #[error("format '{format}': {message}")]
    BadTemplate { format: String, message: String },
    #[error("a source needs at least one format with at least one row")]
    EmptySpec,
    #[error("could not draw enough distinct rows")]
    Exhausted,
}

impl EvalkitError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalkitError::MissingPlaceholder { .. } => "MISSING_PLACEHOLDER",
            EvalkitError::BadTemplate { .. } => "BAD_TEMPLATE",
            EvalkitError::EmptySpec => "EMPTY_SPEC",
            EvalkitError::Exhausted => "EXHAUSTED",
        }
    }
}

/// Apply a wrapper to every document, concatenating the records.
pub fn extract_all(w: &Wrapper, documents: &[String]) -> Result<Vec<Record>, IerelError> {
    let mut out = Vec::new();
    for d in documents {
        out.extend(apply_wrapper(w, d)?);
    }
    Ok(out)
}
