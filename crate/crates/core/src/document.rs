//! Arena-backed element tree used for `Document` items.
//!
//! Node ids are assigned in document order, so sorting ids sorts nodes.
//! Node 0 is always the synthetic document node.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::markup::{self, MarkupEvent};
use crate::xml::{self, XmlError, XmlNode};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Document,
    Element { name: String, attributes: Vec<(String, String)> },
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    nodes: Vec<Node>,
}

pub const DOCUMENT_NODE: NodeId = 0;

impl Default for Document {
    fn default() -> Self {
        Document { nodes: vec![Node { kind: NodeKind::Document, parent: None, children: Vec::new() }] }
    }
}

impl Document {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn root_element(&self) -> Option<NodeId> {
        self.nodes[DOCUMENT_NODE]
            .children
            .iter()
            .copied()
            .find(|&c| matches!(self.nodes[c].kind, NodeKind::Element { .. }))
    }

    pub fn name(&self, id: NodeId) -> Option<&str> {
        match &self.nodes[id].kind {
            NodeKind::Element { name, .. } => Some(name),
            _ => None,
        }
    }

    pub fn attribute(&self, id: NodeId, attr: &str) -> Option<&str> {
        match &self.nodes[id].kind {
            NodeKind::Element { attributes, .. } => attributes.iter().find(|(k, _)| k == attr).map(|(_, v)| v.as_str()),
            _ => None,
        }
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn element_children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes[id].children.iter().copied().filter(|&c| matches!(self.nodes[c].kind, NodeKind::Element { .. }))
    }

    /// All element descendants of `id` in document order, `id` excluded.
    pub fn descendant_elements(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = self.nodes[id].children.iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            if matches!(self.nodes[n].kind, NodeKind::Element { .. }) {
                out.push(n);
                stack.extend(self.nodes[n].children.iter().rev().copied());
            }
        }
        out
    }

    /// Concatenated text of all descendants.
    pub fn text_content(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.collect_text(id, &mut out);
        out
    }

    fn collect_text(&self, id: NodeId, out: &mut String) {
        match &self.nodes[id].kind {
            NodeKind::Text(t) => out.push_str(t),
            _ => {
                for &c in &self.nodes[id].children {
                    self.collect_text(c, out);
                }
            }
        }
    }

    /// Serialize the subtree rooted at `id` as markup.
    pub fn to_markup(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.write_markup(id, &mut out);
        out
    }

    fn write_markup(&self, id: NodeId, out: &mut String) {
        match &self.nodes[id].kind {
            NodeKind::Document => {
                for &c in &self.nodes[id].children {
                    self.write_markup(c, out);
                }
            }
            NodeKind::Text(t) => out.push_str(&xml::escape_text(t)),
            NodeKind::Element { name, attributes } => {
                out.push('<');
                out.push_str(name);
                for (k, v) in attributes {
                    let _ = write!(out, " {}=\"{}\"", k, xml::escape_attr(v));
                }
                if self.nodes[id].children.is_empty() {
                    out.push_str("/>");
                } else {
                    out.push('>');
                    for &c in &self.nodes[id].children {
                        self.write_markup(c, out);
                    }
                    let _ = write!(out, "</{name}>");
                }
            }
        }
    }

    fn push(&mut self, parent: NodeId, kind: NodeKind) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node { kind, parent: Some(parent), children: Vec::new() });
        self.nodes[parent].children.push(id);
        id
    }

    fn push_text(&mut self, parent: NodeId, text: &str) {
        if text.is_empty() {
            return;
        }
        if let Some(&last) = self.nodes[parent].children.last() {
            if let NodeKind::Text(prev) = &mut self.nodes[last].kind {
                prev.push_str(text);
                return;
            }
        }
        self.push(parent, NodeKind::Text(text.to_string()));
    }

    /// Strict XML parse.
    pub fn parse_xml(text: &str) -> Result<Document, XmlError> {
        let root = xml::parse(text)?;
        let mut doc = Document::default();
        doc.append_xml(DOCUMENT_NODE, &root);
        Ok(doc)
    }

    fn append_xml(&mut self, parent: NodeId, el: &xml::Element) {
        let id = self.push(parent, NodeKind::Element { name: el.name.clone(), attributes: el.attributes.clone() });
        for child in &el.children {
            match child {
                XmlNode::Element(c) => self.append_xml(id, c),
                XmlNode::Text(t) => self.push_text(id, t),
            }
        }
    }

    /// Permissive HTML parse; never fails.
    ///
    /// Repair rules: void elements never take children; an end tag with no
    /// matching open element is ignored; an end tag closes every element
    /// opened after its match; `li`, `p`, `td`/`th`, `tr`, `option` and
    /// `dt`/`dd` close an open sibling of the same family; end of input
    /// closes everything.
    pub fn parse_html(text: &str) -> Document {
        let mut doc = Document::default();
        let mut stack: Vec<NodeId> = vec![DOCUMENT_NODE];
        for event in markup::lex(text) {
            match event {
                MarkupEvent::Start { name, attributes, self_closing } => {
                    close_implied(&doc, &mut stack, &name);
                    let parent = *stack.last().expect("document node");
                    let id = doc.push(parent, NodeKind::Element { name: name.clone(), attributes });
                    if !self_closing && !VOID_ELEMENTS.contains(&name.as_str()) {
                        stack.push(id);
                    }
                }
                MarkupEvent::End { name } => {
                    if let Some(pos) = stack.iter().rposition(|&n| doc.name(n) == Some(name.as_str())) {
                        stack.truncate(pos);
                    }
                }
                MarkupEvent::Text(t) | MarkupEvent::RawText(t) => {
                    let parent = *stack.last().expect("document node");
                    doc.push_text(parent, &t);
                }
            }
        }
        doc
    }
}

const VOID_ELEMENTS: &[&str] =
    &["area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"];

const BLOCK_CLOSES_P: &[&str] = &[
    "p",
    "div",
    "ul",
    "ol",
    "dl",
    "table",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "pre",
    "blockquote",
    "form",
    "hr",
    "section",
    "article",
    "header",
    "footer",
];

/// Pop elements whose end tag is implied by opening `name`.
fn close_implied(doc: &Document, stack: &mut Vec<NodeId>, name: &str) {
    let (closes, boundary): (&[&str], &[&str]) = match name {
        "li" => (&["li"], &["ul", "ol", "menu"]),
        "dt" | "dd" => (&["dt", "dd"], &["dl"]),
        "td" | "th" => (&["td", "th"], &["tr", "table"]),
        "tr" => (&["tr", "td", "th"], &["table", "thead", "tbody", "tfoot"]),
        "option" => (&["option"], &["select", "datalist"]),
        n if BLOCK_CLOSES_P.contains(&n) => (&["p"], &["div", "td", "th", "li", "body", "blockquote"]),
        _ => return,
    };
    // Find the innermost open element of the closing family that is not
    // shielded by a boundary element.
    for pos in (1..stack.len()).rev() {
        let open = doc.name(stack[pos]).unwrap_or("");
        if closes.contains(&open) {
            stack.truncate(pos);
            return;
        }
        if boundary.contains(&open) {
            return;
        }
    }
}

/// Cheap shared handle to one node of a parsed document.
#[derive(Debug, Clone)]
pub struct DocRef {
    pub doc: Arc<Document>,
    pub node: NodeId,
}

impl DocRef {
    pub fn whole(doc: Document) -> Self {
        DocRef { doc: Arc::new(doc), node: DOCUMENT_NODE }
    }

    pub fn text(&self) -> String {
        self.doc.text_content(self.node)
    }

    pub fn markup(&self) -> String {
        self.doc.to_markup(self.node)
    }

    /// The element this handle designates: itself, or the root element for
    /// a whole-document handle.
    pub fn element(&self) -> Option<NodeId> {
        if self.node == DOCUMENT_NODE {
            self.doc.root_element()
        } else {
            Some(self.node)
        }
    }
}

impl PartialEq for DocRef {
    fn eq(&self, other: &Self) -> bool {
        self.markup() == other.markup()
    }
}
