//! Minimal owned XML element tree built on `quick-xml`.
//!
//! Task files, policies and strict-mode documents all go through this module.
//! Namespace prefixes are kept in [`Element::name`] but never resolved, so
//! undeclared prefixes such as `ws:` are accepted.

use std::fmt;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

/// 1-based line/column position inside a source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn from_offset(text: &str, offset: usize) -> Self {
        let offset = offset.min(text.len());
        let before = &text.as_bytes()[..offset];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
        Position { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("malformed XML at {position}: {message}")]
pub struct XmlError {
    pub position: Position,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum XmlNode {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    /// Qualified name as written, prefix included.
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<XmlNode>,
    pub position: Position,
}

impl Element {
    pub fn new(name: impl Into<String>) -> Self {
        Element { name: name.into(), attributes: Vec::new(), children: Vec::new(), position: Position::default() }
    }

    /// Name with any `prefix:` stripped.
    pub fn local_name(&self) -> &str {
        local_part(&self.name)
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attributes.iter().find(|(k, _)| k == name || local_part(k) == name).map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|c| match c {
            XmlNode::Element(e) => Some(e),
            XmlNode::Text(_) => None,
        })
    }

    /// Concatenation of all descendant text.
    pub fn text(&self) -> String {
        let mut out = String::new();
        collect_text(self, &mut out);
        out
    }
}

fn collect_text(e: &Element, out: &mut String) {
    for child in &e.children {
        match child {
            XmlNode::Text(t) => out.push_str(t),
            XmlNode::Element(c) => collect_text(c, out),
        }
    }
}

pub fn local_part(name: &str) -> &str {
    name.rsplit_once(':').map_or(name, |(_, local)| local)
}

/// Parse a well-formed document and return its root element.
///
/// The XML declaration, DOCTYPE, comments and processing instructions are
/// skipped. Exactly one root element is required and only whitespace may
/// appear outside it.
pub fn parse(text: &str) -> Result<Element, XmlError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;
    reader.config_mut().trim_text(false);

    let err =
        |offset: u64, message: String| XmlError { position: Position::from_offset(text, offset as usize), message };

    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    loop {
        let start_offset = reader.buffer_position();
        let event = reader.read_event().map_err(|e| err(reader.error_position(), e.to_string()))?;
        match event {
            Event::Start(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err(err(start_offset, "content after the root element".into()));
                }
                let mut el = open_element(&start, &reader, text, start_offset)?;
                el.position = Position::from_offset(text, start_offset as usize);
                stack.push(el);
            }
            Event::Empty(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err(err(start_offset, "content after the root element".into()));
                }
                let mut el = open_element(&start, &reader, text, start_offset)?;
                el.position = Position::from_offset(text, start_offset as usize);
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Element(el)),
                    None => root = Some(el),
                }
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| err(start_offset, "unexpected end tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Element(el)),
                    None => root = Some(el),
                }
            }
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| err(start_offset, e.to_string()))?.into_owned();
                push_text(&mut stack, s, || err(start_offset, "text outside the root element".into()))?;
            }
            Event::CData(c) => {
                let s = String::from_utf8_lossy(&c.into_inner()).into_owned();
                push_text(&mut stack, s, || err(start_offset, "CDATA outside the root element".into()))?;
            }
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }

    if let Some(open) = stack.last() {
        return Err(XmlError {
            position: Position::from_offset(text, text.len()),
            message: format!("unclosed element <{}>", open.name),
        });
    }
    root.ok_or_else(|| XmlError {
        position: Position::from_offset(text, text.len()),
        message: "no root element".into(),
    })
}

fn push_text(stack: &mut [Element], s: String, outside: impl FnOnce() -> XmlError) -> Result<(), XmlError> {
    match stack.last_mut() {
        Some(parent) => {
            if let Some(XmlNode::Text(prev)) = parent.children.last_mut() {
                prev.push_str(&s);
            } else if !s.is_empty() {
                parent.children.push(XmlNode::Text(s));
            }
            Ok(())
        }
        None if s.trim().is_empty() => Ok(()),
        None => Err(outside()),
    }
}

fn open_element(start: &BytesStart<'_>, reader: &Reader<&[u8]>, text: &str, offset: u64) -> Result<Element, XmlError> {
    let name = String::from_utf8_lossy(start.name().as_ref()).into_owned();
    let mut el = Element::new(name);
    for attr in start.attributes() {
        let attr = attr
            .map_err(|e| XmlError { position: Position::from_offset(text, offset as usize), message: e.to_string() })?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr
            .decode_and_unescape_value(reader.decoder())
            .map_err(|e| XmlError { position: Position::from_offset(text, offset as usize), message: e.to_string() })?
            .into_owned();
        el.attributes.push((key, value));
    }
    Ok(el)
}

/// Escape text content for element bodies.
pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

/// Escape an attribute value for use inside double quotes.
///
/// Whitespace control characters are written as character references so
/// attribute-value normalization does not alter them on re-read.
pub fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            _ => out.push(c),
        }
    }
    out
}
