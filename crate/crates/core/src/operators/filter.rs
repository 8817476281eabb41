use std::str::FromStr;

use regex::Regex;

use crate::dataflow::{Item, Payload};

#[derive(Debug, Clone)]
pub enum Test {
    Equals(String),
    Contains(String),
    Matches(Regex),
    LessThan(f64),
    GreaterThan(f64),
}

#[derive(Debug, Clone)]
pub struct Conjunct {
    pub selector: String,
    pub test: Test,
}

/// Conjunction of field tests. The empty predicate accepts everything.
#[derive(Debug, Clone, Default)]
pub struct Predicate {
    pub conjuncts: Vec<Conjunct>,
}

impl Conjunct {
    /// Parse `op:literal` (ops: equals, contains, matches, less-than,
    /// greater-than). Without a recognised prefix the whole spec is an
    /// equality literal.
    pub fn parse(selector: &str, spec: &str) -> Result<Self, String> {
        let (op, literal) = match spec.split_once(':') {
            Some((op, lit)) if is_op(op) => (op, lit),
            _ => ("equals", spec),
        };
        let number = || f64::from_str(literal.trim()).map_err(|_| format!("'{literal}' is not a number for {op}"));
        let test = match op {
            "equals" => Test::Equals(literal.to_string()),
            "contains" => Test::Contains(literal.to_string()),
            "matches" => Test::Matches(Regex::new(literal).map_err(|e| e.to_string())?),
            "less-than" => Test::LessThan(number()?),
            _ => Test::GreaterThan(number()?),
        };
        Ok(Conjunct { selector: selector.to_string(), test })
    }

    fn holds(&self, item: &Item) -> bool {
        let Some(value) = select(item, &self.selector) else {
            return false;
        };
        match &self.test {
            Test::Equals(l) => value == *l,
            Test::Contains(l) => value.contains(l.as_str()),
            Test::Matches(re) => re.is_match(&value),
            Test::LessThan(n) => value.trim().parse::<f64>().is_ok_and(|v| v < *n),
            Test::GreaterThan(n) => value.trim().parse::<f64>().is_ok_and(|v| v > *n),
        }
    }
}

fn is_op(op: &str) -> bool {
    matches!(op, "equals" | "contains" | "matches" | "less-than" | "greater-than")
}

/// Resolve a selector against an item.
///
/// `_text` is the textual content of any payload. Records resolve field
/// names; responses resolve `status`, `url` and header names
/// (case-insensitive); requests resolve `method`, `url` and header names;
/// Url payloads resolve `url`.
pub fn select(item: &Item, selector: &str) -> Option<String> {
    if selector == "_text" {
        return item.payload.text();
    }
    match &item.payload {
        Payload::Record(r) => r.get(selector).cloned(),
        Payload::HttpResponse(r) => match selector {
            "status" => Some(r.status.to_string()),
            "url" => Some(r.url.clone()),
            h => r.header(h).map(str::to_string),
        },
        Payload::HttpRequest(r) => match selector {
            "method" => Some(r.method.to_string()),
            "url" => Some(r.url.clone()),
            h => r.headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(h)).map(|(_, v)| v.clone()),
        },
        Payload::Url(u) if selector == "url" => Some(u.clone()),
        _ => None,
    }
}

impl Predicate {
    pub fn from_params(params: &[(String, String)]) -> Result<Self, String> {
        let conjuncts = params.iter().map(|(k, v)| Conjunct::parse(k, v)).collect::<Result<_, _>>()?;
        Ok(Predicate { conjuncts })
    }

    pub fn holds(&self, item: &Item) -> bool {
        self.conjuncts.iter().all(|c| c.holds(item))
    }
}

/// `[input]` when every conjunct holds, else `[]`.
pub fn filter_items(input: &Item, predicate: &Predicate) -> Vec<Item> {
    if predicate.holds(input) {
        vec![input.clone()]
    } else {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataflow::{HttpResponse, Record};

    fn response(ct: &str) -> Item {
        Item::new(Payload::HttpResponse(HttpResponse {
            url: "http://x/".into(),
            status: 200,
            headers: vec![("Content-Type".into(), ct.into())],
            body: Vec::new(),
        }))
    }

    fn pred(list: &[(&str, &str)]) -> Predicate {
        let p: Vec<(String, String)> = list.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Predicate::from_params(&p).unwrap()
    }

    #[test]
    fn content_type_equality() {
        let p = pred(&[("content-type", "text/html")]);
        assert_eq!(filter_items(&response("text/html"), &p).len(), 1);
        assert!(filter_items(&response("application/pdf"), &p).is_empty());
    }

    #[test]
    fn empty_predicate_accepts() {
        assert_eq!(filter_items(&Item::text("x"), &Predicate::default()).len(), 1);
    }

    #[test]
    fn ops() {
        let mut r = Record::new();
        r.insert("year".into(), "2001".into());
        r.insert("city".into(), "Roma".into());
        let item = Item::record(r);
        assert!(pred(&[("year", "greater-than:2000"), ("city", "matches:^R")]).holds(&item));
        assert!(!pred(&[("year", "less-than:2001")]).holds(&item));
        assert!(pred(&[("city", "contains:om")]).holds(&item));
        assert!(!pred(&[("country", "equals:")]).holds(&item));
        assert!(pred(&[("city", "x:Roma")]).conjuncts[0].selector == "city");
        assert!(!pred(&[("city", "x:Roma")]).holds(&item));
        assert!(Predicate::from_params(&[("a".into(), "less-than:abc".into())]).is_err());
        assert!(Predicate::from_params(&[("a".into(), "matches:(".into())]).is_err());
    }
}
