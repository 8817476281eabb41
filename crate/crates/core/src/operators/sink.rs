use std::path::PathBuf;

use super::template::{record_json, Template};
use crate::dataflow::{Item, Payload};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SinkMode {
    /// One compact JSON object per record.
    Jsonl,
    /// Template rendered per record, values with single quotes doubled.
    Statement(Template),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkConfig {
    pub mode: SinkMode,
    /// File the collected lines are written to at the end of a run.
    pub output: Option<PathBuf>,
}

/// Outcome of sinking one item.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkResult {
    pub passed: Vec<Item>,
    pub line: Option<String>,
    /// Placeholders the record could not supply; rendered as empty strings.
    pub missing: Vec<String>,
}

/// Double single quotes, the SQL string-literal escape.
pub fn sql_quote(value: &str) -> String {
    value.replace('\'', "''")
}

/// Collapse whitespace runs (including newlines) into single spaces.
pub fn one_line(template: &str) -> String {
    template.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Render one output line for a Record; the record itself passes through.
pub fn sink_record(input: &Item, config: &SinkConfig) -> SinkResult {
    let Payload::Record(record) = &input.payload else {
        return SinkResult { passed: Vec::new(), line: None, missing: Vec::new() };
    };
    let (line, missing) = match &config.mode {
        SinkMode::Jsonl => (record_json(record), Vec::new()),
        SinkMode::Statement(t) => t.render(input, sql_quote, true).expect("lenient render cannot fail on records"),
    };
    SinkResult { passed: vec![input.clone()], line: Some(line), missing }
}
