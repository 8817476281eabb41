//! WetDL: the XML task language declaring operators and the `forward-to`
//! edges that coordinate them.
//!
//! ```text
//! <source name="google">
//!   <query name="search" forward-to="results">
//!     <param name="url" value="http://api.google.mock/search"/>
//!   </query>
//!   <parse name="results"/>
//! </source>
//! ```
//!
//! Input accepts both `param` and `parameters` spellings, attribute-style and
//! element-style values, and any namespace prefix. [`serialize_task`] always
//! emits the canonical form, which is a fixed point of parse/serialize.

mod parse;
mod serialize;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::xml::{Position, XmlError};

pub use parse::parse_task;
pub use serialize::serialize_task;
pub use validate::validate_network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Dummy,
    Query,
    Fetch,
    Parse,
    Filter,
    Extract,
    Transform,
    Db,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 8] = [
        OperatorKind::Dummy,
        OperatorKind::Query,
        OperatorKind::Fetch,
        OperatorKind::Parse,
        OperatorKind::Filter,
        OperatorKind::Extract,
        OperatorKind::Transform,
        OperatorKind::Db,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::Dummy => "dummy",
            OperatorKind::Query => "query",
            OperatorKind::Fetch => "fetch",
            OperatorKind::Parse => "parse",
            OperatorKind::Filter => "filter",
            OperatorKind::Extract => "extract",
            OperatorKind::Transform => "transform",
            OperatorKind::Db => "db",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperatorKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or(())
    }
}

/// Ordered key/value parameter list.
pub type Params = Vec<(String, String)>;

/// Key under which a `<map>` child's ordered `<key>` list is stored.
pub const MAP_PARAM: &str = "map";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub name: String,
    pub forward_to: Vec<String>,
    pub params: Params,
    pub inline_data: Vec<String>,
    pub query_template: Option<String>,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, name: impl Into<String>) -> Self {
        OperatorSpec {
            kind,
            name: name.into(),
            forward_to: Vec::new(),
            params: Vec::new(),
            inline_data: Vec::new(),
            query_template: None,
        }
    }

    pub fn forward(mut self, targets: &[&str]) -> Self {
        self.forward_to = targets.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn param(mut self, key: &str, value: &str) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn data(mut self, value: &str) -> Self {
        self.inline_data.push(value.to_string());
        self
    }

    /// Last value bound to `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TaskNetwork {
    pub source_name: String,
    pub operators: Vec<OperatorSpec>,
}

impl TaskNetwork {
    pub fn new(source_name: impl Into<String>) -> Self {
        TaskNetwork { source_name: source_name.into(), operators: Vec::new() }
    }

    pub fn with(mut self, op: OperatorSpec) -> Self {
        self.operators.push(op);
        self
    }

    pub fn operator(&self, name: &str) -> Option<&OperatorSpec> {
        self.operators.iter().find(|o| o.name == name)
    }

    /// Operators that no `forward-to` edge points at, in document order.
    pub fn entry_points(&self) -> Vec<&str> {
        self.operators
            .iter()
            .filter(|o| !self.operators.iter().any(|p| p.forward_to.contains(&o.name)))
            .map(|o| o.name.as_str())
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.operators.iter().map(|o| o.forward_to.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locus {
    Operator(String),
    Position { line: usize, column: usize },
    Network,
}

impl From<Position> for Locus {
    fn from(p: Position) -> Self {
        Locus::Position { line: p.line, column: p.column }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub locus: Locus,
}

impl Diagnostic {
    pub fn error(code: &str, message: impl Into<String>, locus: Locus) -> Self {
        Diagnostic { severity: Severity::Error, code: code.to_string(), message: message.into(), locus }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match &self.locus {
            Locus::Operator(op) => write!(f, "{sev}[{}] {}: {}", self.code, op, self.message),
            Locus::Position { line, column } => {
                write!(f, "{sev}[{}] {line}:{column}: {}", self.code, self.message)
            }
            Locus::Network => write!(f, "{sev}[{}] {}", self.code, self.message),
        }
    }
}

/// Diagnostic codes.
pub mod codes {
    pub const XML: &str = "XML";
    pub const BAD_ROOT: &str = "BAD_ROOT";
    pub const UNKNOWN_OPERATOR: &str = "UNKNOWN_OPERATOR";
    pub const UNKNOWN_ELEMENT: &str = "UNKNOWN_ELEMENT";
    pub const MISSING_NAME: &str = "MISSING_NAME";
    pub const DUP_NAME: &str = "DUP_NAME";
    pub const UNRESOLVED_EDGE: &str = "UNRESOLVED_EDGE";
    pub const CYCLE: &str = "CYCLE";
    pub const DATA_NOT_ALLOWED: &str = "DATA_NOT_ALLOWED";
    pub const QUERY_NOT_ALLOWED: &str = "QUERY_NOT_ALLOWED";
}

#[derive(Debug, thiserror::Error)]
pub enum WetdlError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("invalid task description: {}", summarize(.0))]
    Invalid(Vec<Diagnostic>),
}

impl WetdlError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            WetdlError::Xml(e) => {
                vec![Diagnostic::error(codes::XML, e.message.clone(), e.position.into())]
            }
            WetdlError::Invalid(d) => d.clone(),
        }
    }
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}
