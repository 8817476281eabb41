use std::collections::{BTreeMap, HashSet};

use super::locate::{extract_context, locate_instance};
use super::pattern::{generalize_pair, Pattern, PatternToken};
use super::tokens::{preprocess, Token};
use super::wrapper::{Wrapper, TOKENIZER_VERSION};
use super::{ExampleInstance, IerelError, LearnConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleReport {
    pub index: usize,
    /// Occurrences found across the whole corpus.
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LearnReport {
    pub examples: Vec<ExampleReport>,
    /// Indices of examples found nowhere in the corpus.
    pub skipped: Vec<usize>,
    pub initial_patterns: usize,
    pub final_patterns: usize,
}

/// Context patterns of one example over a tokenized corpus, slot bounds
/// widened to the configured bound.
pub fn context_patterns(corpus: &[Vec<Token>], example: &ExampleInstance, config: &LearnConfig) -> Vec<Pattern> {
    let mut out = Vec::new();
    for tokens in corpus {
        for occ in locate_instance(tokens, example, config.window) {
            let mut p = extract_context(tokens, &occ, config.left, config.right);
            for t in &mut p.tokens {
                if let PatternToken::Slot { max_len, .. } = t {
                    *max_len = (*max_len).max(config.slot_bound);
                }
            }
            out.push(p);
        }
    }
    out
}

/// Merge patterns until no pair generalizes.
///
/// The set is deduplicated and kept sorted by canonical form; the first
/// mergeable pair in that order is replaced by its merge. Each merge
/// removes one pattern, so this terminates.
pub fn fixpoint(patterns: Vec<Pattern>, gap_bound: usize) -> Vec<Pattern> {
    let mut set: BTreeMap<String, Pattern> = patterns.into_iter().map(|p| (p.canonical(), p)).collect();
    'outer: loop {
        let keys: Vec<&String> = set.keys().collect();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                if let Ok(merged) = generalize_pair(&set[keys[i]], &set[keys[j]], gap_bound) {
                    let (a, b) = (keys[i].clone(), keys[j].clone());
                    set.remove(&a);
                    set.remove(&b);
                    set.insert(merged.canonical(), merged);
                    continue 'outer;
                }
            }
        }
        break;
    }
    set.into_values().collect()
}

/// Learn a wrapper from example instances located in `corpus`.
///
/// Examples found nowhere are skipped and listed in the report; if none
/// is found the call fails. The result depends only on the set of
/// examples, not their order or multiplicity.
pub fn learn_wrapper(
    corpus: &[String],
    examples: &[ExampleInstance],
    config: &LearnConfig,
) -> Result<(Wrapper, LearnReport), IerelError> {
    let fields: Vec<String> =
        examples.first().ok_or(IerelError::NoUsableExamples)?.field_names().into_iter().map(str::to_string).collect();
    let mut seen = HashSet::new();
    if let Some(dup) = fields.iter().find(|f| !seen.insert(f.as_str())) {
        return Err(IerelError::DuplicateField(dup.clone()));
    }
    for ex in examples {
        let names: Vec<String> = ex.field_names().into_iter().map(str::to_string).collect();
        if names != fields {
            return Err(IerelError::FieldMismatch(fields, names));
        }
    }

    let tokenized: Vec<Vec<Token>> = corpus.iter().map(|d| preprocess(d)).collect();
    let mut report = LearnReport::default();
    let mut initial = Vec::new();
    for (index, ex) in examples.iter().enumerate() {
        let found = context_patterns(&tokenized, ex, config);
        if found.is_empty() {
            report.skipped.push(index);
        }
        report.examples.push(ExampleReport { index, occurrences: found.len() });
        initial.extend(found);
    }
    if initial.is_empty() {
        return Err(IerelError::NoUsableExamples);
    }
    report.initial_patterns = initial.len();
    let patterns = fixpoint(initial, config.gap_bound);
    report.final_patterns = patterns.len();

    let wrapper = Wrapper { version: TOKENIZER_VERSION.to_string(), fields, config: *config, patterns };
    Ok((wrapper, report))
}
