//! Adaptation policies: parsing, evaluation against a property store, and
//! planning of registry reconfigurations.
//!
//! Two policy forms exist. A system policy holds rules whose condition
//! compares one property with a literal and whose ensure block lists
//! registry actions. An extraction directive names a WetDL file; analysing
//! it yields the detach/attach plan that fits the registry to the task.

mod analysis;
mod evaluate;
mod policy;
mod props;

use std::fmt;
use std::str::FromStr;

pub use analysis::{analyze_extraction_directive, required_services, ExtractionAnalysis};
pub use evaluate::{evaluate, plan_actions, EvalError, Evaluation, Unevaluable};
pub use policy::{parse_policy, DIRECTIVE_ROOT, SYSTEM_ROOT, WETDL_LANGUAGE};
pub use props::{PropertyStore, Value};

use crate::dataflow::RegistryError;
pub use crate::dataflow::{Action, ReconfigurationPlan};
use crate::wetdl::Diagnostic;
use crate::xml::XmlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    LessThan,
    GreaterThan,
    Equals,
}

impl CompareOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CompareOp::LessThan => "less-than",
            CompareOp::GreaterThan => "greater-than",
            CompareOp::Equals => "equals",
        }
    }
}

impl FromStr for CompareOp {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "less-than" => Ok(CompareOp::LessThan),
            "greater-than" => Ok(CompareOp::GreaterThan),
            "equals" => Ok(CompareOp::Equals),
            _ => Err(()),
        }
    }
}

/// `left op right`, where `left` is a property path.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub op: CompareOp,
    pub left: String,
    pub right: Value,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.op.as_str(), self.right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub when: Condition,
    /// Never empty.
    pub ensure: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub name: String,
    /// Never empty.
    pub rules: Vec<Rule>,
}

/// Request to (re)define an extraction service from a WetDL file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionDirective {
    pub name: String,
    pub summary: Option<String>,
    pub location: Option<String>,
    /// Informational address of the task; used only when `wdl` is absent.
    pub url: Option<String>,
    pub language: String,
    pub wdl: Option<String>,
}

impl ExtractionDirective {
    /// Where the WetDL file is fetched from. Scheme-less addresses are taken
    /// as http.
    pub fn wdl_location(&self) -> String {
        let raw = self.wdl.as_deref().or(self.url.as_deref()).unwrap_or_default();
        if raw.contains("://") {
            raw.to_string()
        } else {
            format!("http://{raw}")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyDocument {
    System(Policy),
    Extraction(ExtractionDirective),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum AdaptError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("unsupported policy root <{0}>")]
    BadRoot(String),
    #[error("unexpected element <{name}> at line {line}")]
    UnknownElement { name: String, line: usize },
    #[error("<{element}> is missing '{attribute}'")]
    MissingAttribute { element: String, attribute: String },
    #[error("policy '{0}' has no rules")]
    NoRules(String),
    #[error("rule has no condition")]
    MissingCondition,
    #[error("rule has an empty ensure block")]
    EmptyEnsure,
    #[error("'{0}' is not a number")]
    BadNumber(String),
    #[error("unsupported task language '{0}'")]
    UnsupportedLanguage(String),
    #[error("line {line}: {message}")]
    BadProperty { line: usize, message: String },
    #[error("property '{0}' is defined twice")]
    DupProperty(String),
    #[error("cannot fetch '{0}'")]
    FetchFailed(String),
    #[error("invalid task description: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidWetdl(Vec<Diagnostic>),
    #[error("plan rejected: {}", .0.iter().map(|(a, e)| format!("{a}: {e}")).collect::<Vec<_>>().join("; "))]
    Rejected(Vec<(Action, RegistryError)>),
}

impl AdaptError {
    pub fn code(&self) -> &'static str {
        match self {
            AdaptError::Xml(_) => "XML",
            AdaptError::BadRoot(_) => "BAD_ROOT",
            AdaptError::UnknownElement { .. } => "UNKNOWN_ELEMENT",
            AdaptError::MissingAttribute { .. } => "MISSING_ATTRIBUTE",
            AdaptError::NoRules(_) => "NO_RULES",
            AdaptError::MissingCondition => "MISSING_CONDITION",
            AdaptError::EmptyEnsure => "EMPTY_ENSURE",
            AdaptError::BadNumber(_) => "BAD_NUMBER",
            AdaptError::UnsupportedLanguage(_) => "UNSUPPORTED_LANGUAGE",
            AdaptError::BadProperty { .. } => "BAD_PROPERTY",
            AdaptError::DupProperty(_) => "DUP_PROPERTY",
            AdaptError::FetchFailed(_) => "FETCH_FAILED",
            AdaptError::InvalidWetdl(_) => "INVALID_WETDL",
            AdaptError::Rejected(f) => f.first().map_or("REJECTED", |(_, e)| e.code()),
        }
    }
}
