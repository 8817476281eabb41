//! Wrapper learning by context generalization.
//!
//! Learning runs in three phases. Documents are reduced to tag and word
//! tokens ([`preprocess`]). Each example instance is located and the tokens
//! around it become a first pattern ([`locate_instance`],
//! [`extract_context`]). Patterns sharing a tag skeleton are then merged
//! until no pair merges ([`generalize_pair`], [`learn_wrapper`]).
//!
//! Merging is strict on tags: two patterns whose tag skeletons differ never
//! merge, so a source with several row layouts yields several patterns.

mod learn;
mod locate;
mod matcher;
mod pattern;
mod tokens;
mod wrapper;

pub use learn::{context_patterns, fixpoint, learn_wrapper, ExampleReport, LearnReport};
pub use locate::{extract_context, locate_instance, FieldMatch, Occurrence};
pub use matcher::{match_at, Match};
pub use pattern::{generalize_pair, Failure, Pattern, PatternToken};
pub use tokens::{normalize_value, preprocess, words, Token};
pub use wrapper::{apply_wrapper, Wrapper, TOKENIZER_VERSION};

use serde::{Deserialize, Serialize};

/// One example: ordered (field name, value) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleInstance {
    pub fields: Vec<(String, String)>,
}

impl ExampleInstance {
    pub fn new(fields: &[(&str, &str)]) -> Self {
        ExampleInstance { fields: fields.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }

    pub fn field_names(&self) -> Vec<&str> {
        self.fields.iter().map(|(k, _)| k.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnConfig {
    /// Tokens of left context.
    pub left: usize,
    /// Tokens of right context.
    pub right: usize,
    /// Largest token span an occurrence may cover.
    pub window: usize,
    /// Largest number of words a slot may capture.
    pub slot_bound: usize,
    /// Largest number of words a gap may skip.
    pub gap_bound: usize,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig { left: 6, right: 6, window: 200, slot_bound: 30, gap_bound: 20 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IerelError {
    #[error("no example could be located in the corpus")]
    NoUsableExamples,
    #[error("examples disagree on field names: {0:?} vs {1:?}")]
    FieldMismatch(Vec<String>, Vec<String>),
    #[error("example has duplicate field '{0}'")]
    DuplicateField(String),
    #[error("wrapper was built with tokenizer '{found}', this library uses '{expected}'")]
    VersionMismatch { found: String, expected: String },
    #[error("invalid wrapper file: {0}")]
    Format(String),
}
