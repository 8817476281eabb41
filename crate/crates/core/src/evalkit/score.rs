use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dataflow::Record;

/// Comparison key of a record: non-empty fields, sorted by name. An absent
/// field and an empty one compare equal.
fn key(r: &Record) -> BTreeMap<&str, &str> {
    r.iter().filter(|(_, v)| !v.is_empty()).map(|(k, v)| (k.as_str(), v.as_str())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Score {
    pub considered: usize,
    /// Distinct extracted records.
    pub retrieved: usize,
    /// Distinct extracted records found in the truth set.
    pub correct: usize,
}

impl Score {
    pub fn recall(&self) -> f64 {
        self.correct as f64 / self.considered.max(1) as f64
    }

    /// `None` when nothing was retrieved.
    pub fn accuracy(&self) -> Option<f64> {
        (self.retrieved > 0).then(|| self.correct as f64 / self.retrieved as f64)
    }
}

/// Score extracted records against the truth set. `considered` is the
/// number of instances the source holds and must be at least 1.
pub fn score(extracted: &[Record], truth: &[Record], considered: usize) -> Score {
    let truth: BTreeSet<_> = truth.iter().map(key).collect();
    let found: BTreeSet<_> = extracted.iter().map(key).collect();
    Score { considered, retrieved: found.len(), correct: found.intersection(&truth).count() }
}

/// One line of a results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationRow {
    pub source: String,
    pub examples: usize,
    pub instances: usize,
    pub retrieved: usize,
    pub correct: usize,
    pub recall: f64,
    pub accuracy: Option<f64>,
}

impl EvaluationRow {
    pub fn new(source: &str, examples: usize, s: &Score) -> Self {
        EvaluationRow {
            source: source.to_string(),
            examples,
            instances: s.considered,
            retrieved: s.retrieved,
            correct: s.correct,
            recall: s.recall(),
            accuracy: s.accuracy(),
        }
    }

    /// Recall rounded half-up to two decimals.
    pub fn recall_text(&self) -> String {
        ratio_2dp(self.correct, self.instances)
    }

    /// Accuracy rounded half-up to two decimals, or `n/a`.
    pub fn accuracy_text(&self) -> String {
        if self.retrieved == 0 {
            "n/a".into()
        } else {
            ratio_2dp(self.correct, self.retrieved)
        }
    }
}

/// `num / den` rounded half-up to two decimals, computed exactly.
pub fn ratio_2dp(num: usize, den: usize) -> String {
    let den = den.max(1) as u128;
    let hundredths = (200 * num as u128 + den) / (2 * den);
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}
