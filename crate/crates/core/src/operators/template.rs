use std::str::FromStr;

use crate::dataflow::{Item, Payload, Record};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Literal(String),
    Field(String),
    /// `$_text`: the input's full text.
    Text,
    /// `$_json`: compact JSON of a record, fields in record order.
    Json,
}

/// `$name` / `${name}` substitution template. `$$` is a literal dollar and
/// a `$` not followed by a name stays literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub segments: Vec<Segment>,
}

impl FromStr for Template {
    type Err = String;

    fn from_str(src: &str) -> Result<Self, Self::Err> {
        if src.is_empty() {
            return Err("template is empty".into());
        }
        let mut segments = Vec::new();
        let mut lit = String::new();
        let mut rest = src;
        while let Some(pos) = rest.find('$') {
            lit.push_str(&rest[..pos]);
            rest = &rest[pos + 1..];
            let name = if rest.starts_with('$') {
                lit.push('$');
                rest = &rest[1..];
                continue;
            } else if let Some(braced) = rest.strip_prefix('{') {
                let end = braced.find('}').ok_or_else(|| format!("unterminated '${{' in template '{src}'"))?;
                let name = &braced[..end];
                if name.is_empty() {
                    return Err(format!("empty '${{}}' in template '{src}'"));
                }
                rest = &braced[end + 1..];
                name
            } else {
                let end = rest
                    .char_indices()
                    .find(|&(i, c)| !(c == '_' || c.is_ascii_alphabetic() || (i > 0 && c.is_ascii_digit())))
                    .map_or(rest.len(), |(i, _)| i);
                if end == 0 {
                    lit.push('$');
                    continue;
                }
                let name = &rest[..end];
                rest = &rest[end..];
                name
            };
            if !lit.is_empty() {
                segments.push(Segment::Literal(std::mem::take(&mut lit)));
            }
            segments.push(match name {
                "_text" => Segment::Text,
                "_json" => Segment::Json,
                n => Segment::Field(n.to_string()),
            });
        }
        lit.push_str(rest);
        if !lit.is_empty() {
            segments.push(Segment::Literal(lit));
        }
        Ok(Template { segments })
    }
}

/// Failure to render: the first placeholder the input cannot supply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingField(pub String);

impl Template {
    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Field(f) => Some(f.as_str()),
            _ => None,
        })
    }

    /// Render against `item`, passing every substituted value through
    /// `escape`. With `lenient`, missing fields render as empty strings and
    /// are reported in the returned list.
    pub fn render(
        &self,
        item: &Item,
        escape: impl Fn(&str) -> String,
        lenient: bool,
    ) -> Result<(String, Vec<String>), MissingField> {
        let record = match &item.payload {
            Payload::Record(r) => Some(r),
            _ => None,
        };
        let mut out = String::new();
        let mut missing = Vec::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(l) => out.push_str(l),
                Segment::Text => {
                    let text = item.payload.text().or_else(|| record.map(record_text)).unwrap_or_default();
                    out.push_str(&escape(&text));
                }
                Segment::Json => match record {
                    Some(r) => out.push_str(&escape(&record_json(r))),
                    None => return Err(MissingField("_json".into())),
                },
                Segment::Field(f) => match record.and_then(|r| r.get(f)) {
                    Some(v) => out.push_str(&escape(v)),
                    None if lenient => missing.push(f.clone()),
                    None => return Err(MissingField(f.clone())),
                },
            }
        }
        Ok((out, missing))
    }
}

/// Compact JSON object with keys in record order.
pub fn record_json(r: &Record) -> String {
    serde_json::to_string(r).expect("string map serializes")
}

fn record_text(r: &Record) -> String {
    r.values().map(String::as_str).collect::<Vec<_>>().join(" ")
}
