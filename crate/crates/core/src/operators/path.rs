use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::document::{DocRef, Document, NodeId, NodeKind, DOCUMENT_NODE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Child,
    Descendant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub axis: Axis,
    /// Element name, or `*`.
    pub test: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Terminal {
    Attribute(String),
    Text(Axis),
}

/// Small XPath subset: `/` and `//` axes, name or `*` tests, and an optional
/// trailing `@attr` or `text()`.
///
/// A leading slash anchors at the document node; otherwise steps start at
/// the context element. Names compare case-sensitively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathExpression {
    pub absolute: bool,
    pub steps: Vec<Step>,
    pub terminal: Option<Terminal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathValue {
    Node(NodeId),
    Text(String),
}

impl FromStr for PathExpression {
    type Err = String;

    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let s = src.trim();
        if s.is_empty() {
            return Err("empty path expression".into());
        }
        let absolute = s.starts_with('/');
        let mut rest = s;
        let mut steps = Vec::new();
        let mut terminal = None;
        let mut first = true;
        while !rest.is_empty() {
            let axis = if let Some(r) = rest.strip_prefix("//") {
                rest = r;
                Axis::Descendant
            } else if let Some(r) = rest.strip_prefix('/') {
                rest = r;
                Axis::Child
            } else if first {
                Axis::Child
            } else {
                return Err(format!("expected '/' in '{src}'"));
            };
            first = false;
            let end = rest.find('/').unwrap_or(rest.len());
            let token = &rest[..end];
            rest = &rest[end..];
            if token.is_empty() {
                return Err(format!("empty step in '{src}'"));
            }
            if let Some(attr) = token.strip_prefix('@') {
                if attr.is_empty() || !is_name(attr) {
                    return Err(format!("bad attribute name in '{src}'"));
                }
                if axis == Axis::Descendant {
                    return Err(format!("'//@' is not supported in '{src}'"));
                }
                terminal = Some(Terminal::Attribute(attr.to_string()));
            } else if token == "text()" {
                terminal = Some(Terminal::Text(axis));
            } else if token == "*" || is_name(token) {
                steps.push(Step { axis, test: token.to_string() });
                continue;
            } else {
                return Err(format!("unsupported step '{token}' in '{src}'"));
            }
            if !rest.is_empty() {
                return Err(format!("'{token}' must be the last step in '{src}'"));
            }
        }
        Ok(PathExpression { absolute, steps, terminal })
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':'))
}

impl fmt::Display for PathExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = |axis: Axis| if axis == Axis::Descendant { "//" } else { "/" };
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 || self.absolute || step.axis == Axis::Descendant {
                f.write_str(sep(step.axis))?;
            }
            f.write_str(&step.test)?;
        }
        match &self.terminal {
            Some(Terminal::Attribute(a)) => write!(f, "/@{a}"),
            Some(Terminal::Text(axis)) => write!(f, "{}text()", sep(*axis)),
            None => Ok(()),
        }
    }
}

impl PathExpression {
    /// Evaluate against `ctx`; results are in document order.
    pub fn evaluate(&self, ctx: &DocRef) -> Vec<PathValue> {
        let doc = &ctx.doc;
        let start = if self.absolute { DOCUMENT_NODE } else { ctx.node };
        let mut current: BTreeSet<NodeId> = BTreeSet::from([start]);
        for step in &self.steps {
            let mut next = BTreeSet::new();
            for &n in &current {
                let candidates: Vec<NodeId> = match step.axis {
                    Axis::Child => doc.element_children(n).collect(),
                    Axis::Descendant => doc.descendant_elements(n),
                };
                next.extend(candidates.into_iter().filter(|&c| step.test == "*" || doc.name(c) == Some(&step.test)));
            }
            current = next;
        }
        match &self.terminal {
            None => current.into_iter().map(PathValue::Node).collect(),
            Some(Terminal::Attribute(a)) => current
                .into_iter()
                .filter_map(|n| doc.attribute(n, a).map(|v| PathValue::Text(v.to_string())))
                .collect(),
            Some(Terminal::Text(axis)) => {
                let mut texts = BTreeSet::new();
                for &n in &current {
                    collect_text_nodes(doc, n, *axis, &mut texts);
                }
                texts
                    .into_iter()
                    .filter_map(|t| match &doc.node(t).kind {
                        NodeKind::Text(s) if !s.trim().is_empty() => Some(PathValue::Text(s.trim().to_string())),
                        _ => None,
                    })
                    .collect()
            }
        }
    }
}

fn collect_text_nodes(doc: &Document, n: NodeId, axis: Axis, out: &mut BTreeSet<NodeId>) {
    for &c in doc.children(n) {
        match doc.node(c).kind {
            NodeKind::Text(_) => {
                out.insert(c);
            }
            NodeKind::Element { .. } if axis == Axis::Descendant => collect_text_nodes(doc, c, axis, out),
            _ => {}
        }
    }
}
