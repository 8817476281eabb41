use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use wexfab::wetdl::{codes, parse_task, serialize_task, validate_network, OperatorKind, OperatorSpec, TaskNetwork};

fn kind() -> impl Strategy<Value = OperatorKind> {
    prop::sample::select(OperatorKind::ALL.to_vec())
}

fn value() -> impl Strategy<Value = String> {
    "[ -~\t\né€]{0,12}"
}

/// Text content in the form the parser returns it: trimmed.
fn trimmed() -> impl Strategy<Value = String> {
    value().prop_map(|s| s.trim().to_string())
}

fn params() -> impl Strategy<Value = Vec<(String, String)>> {
    let key = "[a-z][a-z0-9-]{0,5}".prop_filter("reserved", |k| k != "map");
    prop::collection::vec((key, value()), 0..4)
}

/// Acyclic network: edges only run from lower to higher creation index;
/// document order is an arbitrary permutation of creation order.
fn network() -> impl Strategy<Value = TaskNetwork> {
    (1usize..7)
        .prop_flat_map(|n| {
            (
                prop::collection::btree_set("[a-z][a-z0-9_]{0,6}", n),
                prop::collection::vec(
                    (
                        kind(),
                        params(),
                        prop::collection::vec(trimmed(), 0..3),
                        prop::option::of(trimmed()),
                        prop::collection::vec(any::<bool>(), n),
                    ),
                    n,
                ),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                value(),
            )
        })
        .prop_map(|(names, ops, order, source)| {
            let names: Vec<String> = names.into_iter().collect();
            let specs: Vec<OperatorSpec> = ops
                .into_iter()
                .enumerate()
                .map(|(i, (kind, params, data, query, edges))| {
                    let mut op = OperatorSpec::new(kind, names[i].clone());
                    op.params = params;
                    if kind == OperatorKind::Dummy {
                        op.inline_data = data;
                    }
                    if kind == OperatorKind::Db {
                        op.query_template = query;
                    }
                    op.forward_to = edges
                        .iter()
                        .enumerate()
                        .filter(|(j, e)| **e && *j > i)
                        .map(|(j, _)| names[j].clone())
                        .collect();
                    op
                })
                .collect();
            let mut net = TaskNetwork::new(source);
            net.operators = order.into_iter().map(|i| specs[i].clone()).collect();
            net
        })
}

/// Arbitrary names and edges, including duplicates, dangling targets and
/// cycles.
fn wild_network() -> impl Strategy<Value = TaskNetwork> {
    let name = prop::sample::select(vec!["a", "b", "c", "d", "e"]);
    prop::collection::vec(
        (name.clone(), prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "zz"]), 0..3)),
        0..6,
    )
    .prop_map(|ops| {
        let mut net = TaskNetwork::new("wild");
        for (n, targets) in ops {
            net.operators.push(OperatorSpec::new(OperatorKind::Dummy, n).forward(&targets));
        }
        net
    })
}

/// Independent cycle check: depth-first search with colors over the
/// resolvable edges.
fn has_cycle(net: &TaskNetwork) -> bool {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for o in &net.operators {
        adj.entry(&o.name).or_default().extend(o.forward_to.iter().map(String::as_str));
    }
    fn visit<'a>(n: &'a str, adj: &HashMap<&'a str, Vec<&'a str>>, color: &mut HashMap<&'a str, u8>) -> bool {
        match color.get(n) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        color.insert(n, 1);
        for &m in adj.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            if adj.contains_key(m) && visit(m, adj, color) {
                return true;
            }
        }
        color.insert(n, 2);
        false
    }
    let mut color = HashMap::new();
    adj.keys().any(|n| visit(n, &adj, &mut color))
}

/// The same network written with the alternative spellings the parser
/// accepts.
fn loose_xml(net: &TaskNetwork) -> String {
    let esc = |s: &str| {
        s.replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;")
            .replace('"', "&quot;")
            .replace('\t', "&#9;")
            .replace('\n', "&#10;")
    };
    let mut out = format!("<ws:source xmlns:ws=\"urn:x\" name=\"{}\">\n", esc(&net.source_name));
    for o in &net.operators {
        out.push_str(&format!("<ws:{} name=\"{}\" forward-to=\" {} \">\n", o.kind, o.name, o.forward_to.join(" , ")));
        for (k, v) in &o.params {
            out.push_str(&format!("<parameters name=\"{k}\" value=\"{}\"/>\n", esc(v)));
        }
        for d in &o.inline_data {
            out.push_str(&format!("<data>  {}  </data>\n", esc(d)));
        }
        if let Some(q) = &o.query_template {
            out.push_str(&format!("<query>\n{}\n</query>\n", esc(q)));
        }
        out.push_str(&format!("</ws:{}>\n", o.kind));
    }
    out.push_str("</ws:source>\n");
    out
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(net in network()) {
        let xml = serialize_task(&net).unwrap();
        prop_assert_eq!(parse_task(&xml).unwrap(), net);
    }

    #[test]
    fn canonical_form_is_a_fixed_point(net in network()) {
        let loose = loose_xml(&net);
        let parsed = parse_task(&loose).unwrap();
        prop_assert_eq!(&parsed, &net);
        let once = serialize_task(&parsed).unwrap();
        let twice = serialize_task(&parse_task(&once).unwrap()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn generated_networks_validate(net in network()) {
        prop_assert!(validate_network(&net).iter().all(|d| !d.is_error()));
    }

    #[test]
    fn clean_validation_means_dag_with_resolved_edges(net in wild_network()) {
        let diags = validate_network(&net);
        let names: BTreeSet<&str> = net.operators.iter().map(|o| o.name.as_str()).collect();
        let unique = names.len() == net.operators.len();
        let resolved = net.operators.iter().flat_map(|o| &o.forward_to).all(|t| names.contains(t.as_str()));
        if diags.iter().all(|d| !d.is_error()) {
            prop_assert!(unique && resolved && !has_cycle(&net));
        }
        if has_cycle(&net) {
            prop_assert!(diags.iter().any(|d| d.code == codes::CYCLE), "{diags:?}");
        }
        if !resolved {
            prop_assert!(diags.iter().any(|d| d.code == codes::UNRESOLVED_EDGE));
        }
        if !unique {
            prop_assert!(diags.iter().any(|d| d.code == codes::DUP_NAME));
        }
    }
}
