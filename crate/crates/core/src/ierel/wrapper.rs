use std::collections::HashSet;

use serde_json::Value;

use super::matcher::match_at;
use super::pattern::{Pattern, PatternToken};
use super::tokens::preprocess;
use super::{IerelError, LearnConfig};
use crate::dataflow::Record;

/// Identifies the tokenizer rules a wrapper was learned under.
pub const TOKENIZER_VERSION: &str = "ierel-tokens/1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wrapper {
    pub version: String,
    pub fields: Vec<String>,
    pub config: LearnConfig,
    pub patterns: Vec<Pattern>,
}

impl Wrapper {
    /// Canonical JSON: fixed key order, one pattern per line, LF endings.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"version\": {},\n", s(&self.version)));
        out.push_str(&format!("  \"fields\": {},\n", s(&self.fields)));
        out.push_str(&format!("  \"config\": {},\n", s(&self.config)));
        if self.patterns.is_empty() {
            out.push_str("  \"patterns\": []\n");
        } else {
            out.push_str("  \"patterns\": [\n");
            let lines: Vec<String> = self.patterns.iter().map(|p| format!("    {}", p.canonical())).collect();
            out.push_str(&lines.join(",\n"));
            out.push_str("\n  ]\n");
        }
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self, IerelError> {
        let bad = |m: &str| IerelError::Format(m.to_string());
        let v: Value = serde_json::from_str(text).map_err(|e| IerelError::Format(e.to_string()))?;
        let version = v.get("version").and_then(Value::as_str).ok_or_else(|| bad("missing version"))?.to_string();
        let fields: Vec<String> =
            serde_json::from_value(v.get("fields").cloned().ok_or_else(|| bad("missing fields"))?)
                .map_err(|e| IerelError::Format(e.to_string()))?;
        let config: LearnConfig =
            serde_json::from_value(v.get("config").cloned().ok_or_else(|| bad("missing config"))?)
                .map_err(|e| IerelError::Format(e.to_string()))?;
        let mut patterns = Vec::new();
        for p in v.get("patterns").and_then(Value::as_array).ok_or_else(|| bad("missing patterns"))? {
            let tokens = p
                .as_array()
                .ok_or_else(|| bad("pattern is not an array"))?
                .iter()
                .map(|t| PatternToken::from_json(t).ok_or_else(|| IerelError::Format(format!("bad token {t}"))))
                .collect::<Result<Vec<_>, _>>()?;
            for t in &tokens {
                match *t {
                    PatternToken::Slot { field, max_len } if field >= fields.len() || max_len == 0 => {
                        return Err(IerelError::Format(format!("bad slot {}", t.to_json())));
                    }
                    PatternToken::Gap { min, max } if min > max => {
                        return Err(IerelError::Format(format!("bad gap {}", t.to_json())));
                    }
                    _ => {}
                }
            }
            patterns.push(Pattern::new(tokens));
        }
        Ok(Wrapper { version, fields, config, patterns })
    }
}

fn s<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Records found in `document` by any pattern of `w`.
///
/// Each pattern scans left to right taking non-overlapping matches.
/// Matches are ordered by (start, pattern index); duplicate records keep
/// their first position.
pub fn apply_wrapper(w: &Wrapper, document: &str) -> Result<Vec<Record>, IerelError> {
    if w.version != TOKENIZER_VERSION {
        return Err(IerelError::VersionMismatch { found: w.version.clone(), expected: TOKENIZER_VERSION.into() });
    }
    let tokens = preprocess(document);
    let mut found: Vec<(usize, usize, Record)> = Vec::new();
    for (pi, pattern) in w.patterns.iter().enumerate() {
        let mut at = 0;
        while at < tokens.len() {
            match match_at(pattern, &tokens, at) {
                Some(m) if m.end > m.start => {
                    let mut record = Record::new();
                    for &(field, s, e) in &m.slots {
                        let words: Vec<&str> = tokens[s..e].iter().filter_map(|t| t.word()).collect();
                        record.insert(w.fields[field].clone(), words.join(" "));
                    }
                    found.push((m.start, pi, record));
                    at = m.end;
                }
                _ => at += 1,
            }
        }
    }
    found.sort_by_key(|(start, pi, _)| (*start, *pi));
    let mut seen = HashSet::new();
    Ok(found
        .into_iter()
        .map(|(_, _, r)| r)
        .filter(|r| seen.insert(serde_json::to_string(r).expect("string map serializes")))
        .collect())
}
