use std::collections::{HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{codes, Diagnostic, Locus, OperatorKind, TaskNetwork};

/// Check every network invariant and return all violations.
///
/// An empty result means: names are non-empty and unique, every edge
/// resolves, the edge graph is acyclic, and inline data / query templates
/// only appear on the kinds that accept them.
pub fn validate_network(net: &TaskNetwork) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();

    for op in &net.operators {
        let locus = Locus::Operator(op.name.clone());
        if op.name.is_empty() {
            diags.push(Diagnostic::error(codes::MISSING_NAME, "operator name is empty", locus.clone()));
        }
        if !seen.insert(op.name.as_str()) {
            diags.push(Diagnostic::error(
                codes::DUP_NAME,
                format!("operator name '{}' is declared more than once", op.name),
                locus.clone(),
            ));
        }
        if !op.inline_data.is_empty() && op.kind != OperatorKind::Dummy {
            diags.push(Diagnostic::error(
                codes::DATA_NOT_ALLOWED,
                format!("<data> is only allowed on dummy operators, not {}", op.kind),
                locus.clone(),
            ));
        }
        if op.query_template.is_some() && op.kind != OperatorKind::Db {
            diags.push(Diagnostic::error(
                codes::QUERY_NOT_ALLOWED,
                format!("<query> is only allowed on db operators, not {}", op.kind),
                locus,
            ));
        }
    }

    let mut graph = DiGraph::<&str, ()>::new();
    let mut node_of: HashMap<&str, NodeIndex> = HashMap::new();
    for op in &net.operators {
        node_of.entry(op.name.as_str()).or_insert_with(|| graph.add_node(op.name.as_str()));
    }

    for op in &net.operators {
        let from = node_of[op.name.as_str()];
        for target in &op.forward_to {
            match node_of.get(target.as_str()) {
                Some(&to) => {
                    graph.update_edge(from, to, ());
                }
                None => diags.push(Diagnostic::error(
                    codes::UNRESOLVED_EDGE,
                    format!("forward-to target '{target}' is not declared"),
                    Locus::Operator(op.name.clone()),
                )),
            }
        }
    }

    let mut cycles: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || graph.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let mut members: Vec<usize> = scc.into_iter().map(|n| n.index()).collect();
            members.sort_unstable();
            members
        })
        .collect();
    cycles.sort();
    for members in cycles {
        let names: Vec<&str> = members.iter().map(|&i| graph[NodeIndex::new(i)]).collect();
        diags.push(Diagnostic::error(
            codes::CYCLE,
            format!("forward-to edges form a cycle through {}", names.join(", ")),
            Locus::Operator(names[0].to_string()),
        ));
    }

    diags
}
