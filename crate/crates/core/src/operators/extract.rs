use std::collections::HashSet;
use std::sync::Arc;

use regex::Regex;

use super::path::{PathExpression, PathValue};
use crate::dataflow::{Item, Payload, Record};
use crate::document::DocRef;
use crate::ierel::{apply_wrapper, Wrapper};

/// Regular expression whose capture groups are named by `key_map`, group
/// `i + 1` binding `key_map[i]`. Groups that do not participate leave the
/// field absent.
#[derive(Debug, Clone)]
pub struct RegexExtractor {
    pub regex: Regex,
    pub key_map: Vec<String>,
}

impl RegexExtractor {
    pub fn new(pattern: &str, key_map: Vec<String>) -> Result<Self, String> {
        let regex = Regex::new(pattern).map_err(|e| e.to_string())?;
        let groups = regex.captures_len() - 1;
        if groups < key_map.len() {
            return Err(format!("pattern has {groups} capture groups but {} keys are mapped", key_map.len()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = key_map.iter().find(|k| !seen.insert(k.as_str())) {
            return Err(format!("key '{dup}' is mapped twice"));
        }
        Ok(RegexExtractor { regex, key_map })
    }

    pub fn records(&self, text: &str) -> Vec<Record> {
        self.regex
            .captures_iter(text)
            .map(|caps| {
                self.key_map
                    .iter()
                    .enumerate()
                    .filter_map(|(i, key)| caps.get(i + 1).map(|m| (key.clone(), m.as_str().to_string())))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub enum Extractor {
    Path(PathExpression),
    Regex(RegexExtractor),
    /// Response headers by name; output Record starts with the response url.
    Headers(Vec<String>),
    Wrapper(Arc<Wrapper>),
}

/// Sub-parts of `input` selected by `extractor`. A payload the extractor
/// cannot read yields `[]`.
pub fn extract(input: &Item, extractor: &Extractor) -> Vec<Item> {
    match (extractor, &input.payload) {
        (Extractor::Path(p), Payload::Document(d)) => p
            .evaluate(d)
            .into_iter()
            .map(|v| match v {
                PathValue::Node(n) => Item::new(Payload::Document(DocRef { doc: d.doc.clone(), node: n })),
                PathValue::Text(t) => Item::text(t),
            })
            .collect(),
        (Extractor::Path(_), _) => Vec::new(),
        (Extractor::Headers(names), Payload::HttpResponse(r)) => {
            let mut rec = Record::new();
            rec.insert("url".into(), r.url.clone());
            for name in names {
                match r.header(name) {
                    Some(v) => {
                        rec.insert(name.clone(), v.to_string());
                    }
                    None => return Vec::new(),
                }
            }
            vec![Item::record(rec)]
        }
        (Extractor::Headers(_), _) => Vec::new(),
        (Extractor::Regex(rx), p) => match textual(p) {
            Some(text) => rx.records(&text).into_iter().map(Item::record).collect(),
            None => Vec::new(),
        },
        (Extractor::Wrapper(w), p) => match markup_of(p) {
            Some(text) => apply_wrapper(w, &text)
                .map(|records| records.into_iter().map(Item::record).collect())
                .unwrap_or_default(),
            None => Vec::new(),
        },
    }
}

fn textual(p: &Payload) -> Option<String> {
    match p {
        Payload::Text(t) => Some(t.clone()),
        Payload::HttpResponse(r) => Some(r.body_text()),
        Payload::Document(d) => Some(d.text()),
        _ => None,
    }
}

fn markup_of(p: &Payload) -> Option<String> {
    match p {
        Payload::Document(d) => Some(d.markup()),
        other => textual(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataflow::HttpResponse;

    pub(crate) const CONFERENCE: &str =
        r"^\s*([A-Za-z][\w/-]*)\s+([0-9]{4})\s*:\s*([^,]+?)\s*,\s*(?:([^,]+?)\s*,\s*)?([^,]+?)\s*$";

    fn keys() -> Vec<String> {
        ["acronyme", "year", "city", "province", "country"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn conference_line() {
        let rx = RegexExtractor::new(CONFERENCE, keys()).unwrap();
        let recs = rx.records("VLDB 2001: Roma, Italy");
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.get("acronyme").map(String::as_str), Some("VLDB"));
        assert_eq!(r.get("year").map(String::as_str), Some("2001"));
        assert_eq!(r.get("city").map(String::as_str), Some("Roma"));
        assert_eq!(r.get("country").map(String::as_str), Some("Italy"));
        assert!(!r.contains_key("province"));

        let recs = rx.records("SIGMOD 2004 : Paris , Ile-de-France , France");
        assert_eq!(recs[0].get("province").map(String::as_str), Some("Ile-de-France"));
    }

    #[test]
    fn key_map_validation() {
        assert!(RegexExtractor::new("(a)", vec!["x".into(), "y".into()]).is_err());
        assert!(RegexExtractor::new("(a)(b)", vec!["x".into(), "x".into()]).is_err());
        assert!(RegexExtractor::new("(", vec![]).is_err());
    }

    #[test]
    fn headers_record() {
        let resp = Item::new(Payload::HttpResponse(HttpResponse {
            url: "http://x/a.pdf".into(),
            status: 200,
            headers: vec![("Content-Type".into(), "application/pdf".into()), ("content-length".into(), "9".into())],
            body: Vec::new(),
        }));
        let ex = Extractor::Headers(vec!["content-type".into(), "content-length".into()]);
        let out = extract(&resp, &ex);
        match &out[0].payload {
            Payload::Record(r) => {
                assert_eq!(r.keys().collect::<Vec<_>>(), vec!["url", "content-type", "content-length"]);
                assert_eq!(r["content-type"], "application/pdf");
            }
            other => panic!("{other:?}"),
        }
        assert!(extract(&resp, &Extractor::Headers(vec!["last-modified".into()])).is_empty());
    }

    #[test]
    fn kind_mismatch_is_empty() {
        let p = Extractor::Path("//a".parse().unwrap());
        assert!(extract(&Item::text("<a/>"), &p).is_empty());
        assert!(extract(&Item::url("http://x/"), &Extractor::Headers(vec![])).is_empty());
    }
}
