use std::fs;

use proptest::prelude::*;
use wexfab::dataflow::{Item, Method, Payload, Record};
use wexfab::operators::{
    build_http_query, extract, fetch, filter_items, parse_document, Extractor, FetchMode, FixtureStore, Format,
    PathExpression, Predicate,
};

fn record() -> impl Strategy<Value = Record> {
    prop::collection::vec((prop::sample::select(vec!["a", "b", "c"]), "[a-c0-9]{0,3}"), 0..4)
        .prop_map(|pairs| pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn conjunct() -> impl Strategy<Value = (String, String)> {
    let op = prop::sample::select(vec!["equals", "contains", "less-than", "greater-than", ""]);
    (prop::sample::select(vec!["a", "b", "c"]), op, "[a-c0-9]{0,2}")
        .prop_map(|(sel, op, lit)| (sel.to_string(), if op.is_empty() { lit } else { format!("{op}:{lit}") }))
}

/// Reference semantics of one conjunct, written out independently.
fn holds(r: &Record, selector: &str, spec: &str) -> Option<bool> {
    let value = r.get(selector);
    let num = |s: &str| s.trim().parse::<f64>().ok();
    let (op, lit) = spec.split_once(':').unwrap_or(("equals", spec));
    Some(match op {
        "equals" => value.is_some_and(|v| v == lit),
        "contains" => value.is_some_and(|v| v.contains(lit)),
        "less-than" => {
            let n = num(lit)?;
            value.and_then(|v| num(v)).is_some_and(|v| v < n)
        }
        _ => {
            let n = num(lit)?;
            value.and_then(|v| num(v)).is_some_and(|v| v > n)
        }
    })
}

#[derive(Debug, Clone)]
enum Tree {
    Elem(&'static str, Vec<Tree>),
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = prop::sample::select(vec!["a", "b"]).prop_map(|n| Tree::Elem(n, vec![]));
    leaf.prop_recursive(4, 24, 3, |inner| {
        (prop::sample::select(vec!["a", "b"]), prop::collection::vec(inner, 0..3)).prop_map(|(n, c)| Tree::Elem(n, c))
    })
}

/// Markup with every element's leading text numbered in document order,
/// and the numbers of the `a` elements in that order.
fn render(t: &Tree, counter: &mut usize, out: &mut String, a_texts: &mut Vec<String>) {
    let Tree::Elem(name, children) = t;
    let text = format!("t{counter}");
    *counter += 1;
    if *name == "a" {
        a_texts.push(text.clone());
    }
    out.push_str(&format!("<{name}>{text}"));
    for c in children {
        render(c, counter, out, a_texts);
    }
    out.push_str(&format!("</{name}>"));
}

fn texts(items: &[Item]) -> Vec<String> {
    items
        .iter()
        .map(|i| match &i.payload {
            Payload::Text(t) => t.clone(),
            other => panic!("{other:?}"),
        })
        .collect()
}

proptest! {
    #[test]
    fn filter_passes_the_input_or_nothing(r in record(), spec in prop::collection::vec(conjunct(), 0..3)) {
        let Ok(pred) = Predicate::from_params(&spec) else {
            // Only non-numeric literals on ordering tests are refused.
            prop_assert!(spec.iter().any(|(_, s)| holds(&Record::new(), "a", s).is_none()));
            return Ok(());
        };
        let input = Item::record(r.clone());
        let out = filter_items(&input, &pred);
        let expected = spec.iter().all(|(sel, s)| holds(&r, sel, s).unwrap());
        if expected {
            prop_assert_eq!(out, vec![input]);
        } else {
            prop_assert!(out.is_empty());
        }
    }

    #[test]
    fn query_builds_at_most_one_request(
        method in prop::sample::select(vec![Method::Get, Method::Head, Method::Post]),
        host in "[a-z]{1,8}",
        path in "(/[a-z0-9]{0,4}){0,3}",
        junk in "[ -~]{0,12}",
        pairs in prop::collection::vec(("[a-z]{1,4}", "[ -~]{0,6}"), 0..4),
        valid in any::<bool>(),
    ) {
        let base = if valid { format!("http://{host}.org{path}") } else { junk };
        let out = build_http_query(method, &base, &pairs);
        prop_assert!(out.len() <= 1);
        if valid {
            prop_assert_eq!(out.len(), 1);
            let Payload::HttpRequest(req) = &out[0].payload else { panic!("not a request") };
            prop_assert_eq!(req.method, method);
            let carried: Vec<(String, String)> = match method {
                Method::Post => form_pairs(&String::from_utf8(req.body.clone()).unwrap()),
                _ => req.url.split_once('?').map(|(_, q)| form_pairs(q)).unwrap_or_default(),
            };
            prop_assert_eq!(carried, pairs);
        }
    }

    #[test]
    fn path_results_follow_document_order(t in tree()) {
        let (mut xml, mut expected) = (String::new(), Vec::new());
        render(&Tree::Elem("root", vec![t]), &mut 0, &mut xml, &mut expected);
        let doc = parse_document(&Item::text(xml.clone()), Format::Xml);
        prop_assert_eq!(doc.len(), 1);
        let path: PathExpression = "//a/text()".parse().unwrap();
        let ex = Extractor::Path(path);
        let first = extract(&doc[0], &ex);
        prop_assert_eq!(texts(&first), expected);
        prop_assert_eq!(extract(&doc[0], &ex), first);
    }

    #[test]
    fn offline_fetch_is_a_function_of_method_and_normalized_url(
        n in 1usize..5,
        pick in 0usize..5,
        upper in any::<bool>(),
        port in any::<bool>(),
        method in prop::sample::select(vec![Method::Get, Method::Head]),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let mut index = serde_json::Map::new();
        for i in 0..n {
            fs::write(dir.path().join(format!("b{i}.txt")), format!("body {i}")).unwrap();
            index.insert(
                format!("GET http://example.org/p{i}"),
                serde_json::json!({ "status": 200, "headers": [["content-type", "text/plain"]], "body": format!("b{i}.txt") }),
            );
        }
        fs::write(dir.path().join("index.json"), serde_json::Value::Object(index).to_string()).unwrap();
        let mode = FetchMode::offline(FixtureStore::open(dir.path()).unwrap());

        let host = if upper { "EXAMPLE.org" } else { "example.org" };
        let port = if port { ":80" } else { "" };
        let variant = format!("http://{host}{port}/p{pick}");
        let canonical = format!("http://example.org/p{pick}");
        let a = fetch(&Item::url(variant.as_str()), &mode, Some(method));
        let b = fetch(&Item::url(canonical.as_str()), &mode, Some(method));
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(fetch(&Item::url(variant.as_str()), &mode, Some(method)), a.clone());
        let served = pick < n && method == Method::Get;
        prop_assert_eq!(a.len(), usize::from(served));
        if served {
            let Payload::HttpResponse(r) = &a[0].payload else { panic!("not a response") };
            prop_assert_eq!(r.body_text(), format!("body {pick}"));
        }
    }
}

fn form_pairs(q: &str) -> Vec<(String, String)> {
    form_urlencoded::parse(q.as_bytes()).into_owned().collect()
}
