use std::str::FromStr;

use crate::dataflow::{Item, Payload};
use crate::document::{DocRef, Document};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Xml,
    #[default]
    Html,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xml" => Ok(Format::Xml),
            "html" => Ok(Format::Html),
            other => Err(format!("unsupported document format '{other}' (expected xml or html)")),
        }
    }
}

fn content_type_allowed(format: Format, content_type: &str) -> bool {
    let ct = content_type.to_ascii_lowercase();
    match format {
        Format::Xml => ct.contains("xml"),
        Format::Html => ct.contains("html") || ct.contains("xml") || ct.starts_with("text/"),
    }
}

/// Parse textual content into one Document item.
///
/// Responses whose content-type does not fit `format` are rejected. Xml
/// mode is strict; html mode repairs and never fails.
pub fn parse_document(input: &Item, format: Format) -> Vec<Item> {
    let text = match &input.payload {
        Payload::HttpResponse(r) => {
            if let Some(ct) = r.header("content-type") {
                if !content_type_allowed(format, ct) {
                    return Vec::new();
                }
            }
            r.body_text()
        }
        Payload::Text(t) => t.clone(),
        _ => return Vec::new(),
    };
    let doc = match format {
        Format::Xml => match Document::parse_xml(&text) {
            Ok(d) => d,
            Err(_) => return Vec::new(),
        },
        Format::Html => Document::parse_html(&text),
    };
    vec![Item::new(Payload::Document(DocRef::whole(doc)))]
}
