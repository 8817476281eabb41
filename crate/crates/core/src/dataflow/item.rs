use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::document::DocRef;

/// Ordered field-name → value map. Insertion replaces in place, so names
/// stay unique.
pub type Record = IndexMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Get,
    Post,
    Head,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Get => "GET",
            Method::Post => "POST",
            Method::Head => "HEAD",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "GET" => Ok(Method::Get),
            "POST" => Ok(Method::Post),
            "HEAD" => Ok(Method::Head),
            other => Err(format!("unsupported HTTP method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpRequest {
    pub method: Method,
    pub url: String,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl HttpRequest {
    pub fn get(url: impl Into<String>) -> Self {
        HttpRequest { method: Method::Get, url: url.into(), headers: Vec::new(), body: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    /// URL the response was obtained from.
    pub url: String,
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl HttpResponse {
    /// Case-insensitive header lookup.
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
    }

    pub fn body_text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Text(String),
    Url(String),
    HttpRequest(HttpRequest),
    HttpResponse(HttpResponse),
    Document(DocRef),
    Record(Record),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Text(_) => "text",
            Payload::Url(_) => "url",
            Payload::HttpRequest(_) => "request",
            Payload::HttpResponse(_) => "response",
            Payload::Document(_) => "document",
            Payload::Record(_) => "record",
        }
    }

    /// Textual content, when the payload has one.
    pub fn text(&self) -> Option<String> {
        match self {
            Payload::Text(s) | Payload::Url(s) => Some(s.clone()),
            Payload::HttpResponse(r) => Some(r.body_text()),
            Payload::Document(d) => Some(d.text()),
            Payload::HttpRequest(_) | Payload::Record(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Payload::Text(s) => json!({ "text": s }),
            Payload::Url(s) => json!({ "url": s }),
            Payload::HttpRequest(r) => json!({
                "method": r.method.as_str(),
                "url": r.url,
                "headers": r.headers,
                "body": String::from_utf8_lossy(&r.body),
            }),
            Payload::HttpResponse(r) => json!({
                "url": r.url,
                "status": r.status,
                "headers": r.headers,
                "body": r.body_text(),
            }),
            Payload::Document(d) => json!({ "markup": d.markup() }),
            Payload::Record(r) => json!(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub payload: Payload,
    /// Name of the operator that emitted the item; empty for caller input.
    pub provenance: String,
}

impl Item {
    pub fn new(payload: Payload) -> Self {
        Item { payload, provenance: String::new() }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Item::new(Payload::Text(s.into()))
    }

    pub fn url(s: impl Into<String>) -> Self {
        Item::new(Payload::Url(s.into()))
    }

    pub fn record(r: Record) -> Self {
        Item::new(Payload::Record(r))
    }

    pub fn kind(&self) -> &'static str {
        self.payload.kind()
    }

    pub fn from_op(mut self, op: &str) -> Self {
        self.provenance = op.to_string();
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "from": self.provenance,
            "kind": self.kind(),
            "value": self.payload.to_json(),
        })
    }
}

/// Data seeded by a dummy operator: URLs when absolute, text otherwise.
pub fn seed_payload(data: &str) -> Payload {
    match url::Url::parse(data) {
        Ok(u) if u.has_host() => Payload::Url(data.to_string()),
        _ => Payload::Text(data.to_string()),
    }
}
