use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::path::PathBuf;

use super::item::{seed_payload, Item};
use super::registry::ServiceRegistry;
use crate::operators::{ConfigError, Service};
use crate::wetdl::{validate_network, Diagnostic, Locus, OperatorKind, OperatorSpec, TaskNetwork};

pub mod codes {
    pub const UNATTACHED_SERVICE: &str = "UNATTACHED_SERVICE";
    pub const MISSING_PARAM: &str = "MISSING_PARAM";
    pub const BAD_PARAM: &str = "BAD_PARAM";
}

#[derive(Debug, Clone, Default)]
pub struct CompileOptions {
    /// Directory relative file parameters resolve against.
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct PlanNode {
    /// Operator as written, before registry overrides.
    pub spec: OperatorSpec,
    /// Registry entry the node is bound to; `None` for dummies.
    pub binding: Option<String>,
    pub service: Service,
    /// Successor node indices, in `forward-to` order.
    pub successors: Vec<usize>,
}

impl PlanNode {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn kind(&self) -> OperatorKind {
        self.spec.kind
    }
}

#[derive(Debug, Clone)]
pub struct ExecutablePlan {
    pub network: TaskNetwork,
    pub nodes: Vec<PlanNode>,
    /// Node indices in topological order, document order among ties.
    pub order: Vec<usize>,
    /// Items seeded by dummy `data`, tagged with the emitting node.
    pub entry_items: Vec<(String, Item)>,
    pub options: CompileOptions,
}

impl ExecutablePlan {
    pub fn node(&self, name: &str) -> Option<&PlanNode> {
        self.nodes.iter().find(|n| n.spec.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.spec.name == name)
    }

    pub fn edges(&self) -> Vec<(&str, &str)> {
        self.order
            .iter()
            .flat_map(|&i| self.nodes[i].successors.iter().map(move |&j| (i, j)))
            .map(|(i, j)| (self.nodes[i].name(), self.nodes[j].name()))
            .collect()
    }

    /// Nodes no edge points at, in document order.
    pub fn entry_points(&self) -> Vec<usize> {
        let mut indegree = vec![0usize; self.nodes.len()];
        for n in &self.nodes {
            for &s in &n.successors {
                indegree[s] += 1;
            }
        }
        (0..self.nodes.len()).filter(|&i| indegree[i] == 0).collect()
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("cannot compile task: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct CompileError(pub Vec<Diagnostic>);

/// Registry entry serving a node: one named after the node, else one named
/// after its kind.
pub fn binding_for<'a>(spec: &OperatorSpec, registry: &'a ServiceRegistry) -> Option<&'a str> {
    [spec.name.as_str(), spec.kind.as_str()]
        .into_iter()
        .find_map(|n| registry.attached.get_key_value(n).map(|(k, _)| k.as_str()))
}

/// Bind every operator of a valid network to a registry service and
/// configure it.
pub fn compile(
    net: &TaskNetwork,
    registry: &ServiceRegistry,
    options: &CompileOptions,
) -> Result<ExecutablePlan, CompileError> {
    let invalid: Vec<Diagnostic> = validate_network(net).into_iter().filter(Diagnostic::is_error).collect();
    if !invalid.is_empty() {
        return Err(CompileError(invalid));
    }

    let index: HashMap<&str, usize> = net.operators.iter().enumerate().map(|(i, o)| (o.name.as_str(), i)).collect();
    let mut diags = Vec::new();
    let mut nodes = Vec::new();
    for spec in &net.operators {
        let locus = Locus::Operator(spec.name.clone());
        let binding = if spec.kind == OperatorKind::Dummy {
            None
        } else {
            match binding_for(spec, registry) {
                Some(b) => Some(b.to_string()),
                None => {
                    diags.push(Diagnostic::error(
                        codes::UNATTACHED_SERVICE,
                        format!("no attached service provides '{}' ({})", spec.name, spec.kind),
                        locus,
                    ));
                    continue;
                }
            }
        };
        let mut params = spec.params.clone();
        if let Some(entry) = binding.as_deref().and_then(|b| registry.get(b)) {
            for (k, v) in &entry.overrides {
                params.retain(|(pk, _)| pk != k);
                params.push((k.clone(), v.clone()));
            }
        }
        let service =
            match Service::configure(spec.kind, &params, spec.query_template.as_deref(), options.base_dir.as_deref()) {
                Ok(s) => s,
                Err(ConfigError::Missing(p)) => {
                    diags.push(Diagnostic::error(
                        codes::MISSING_PARAM,
                        format!("{} '{}' requires parameter '{p}'", spec.kind, spec.name),
                        locus,
                    ));
                    continue;
                }
                Err(e @ ConfigError::Invalid { .. }) => {
                    diags.push(Diagnostic::error(
                        codes::BAD_PARAM,
                        format!("{} '{}': {e}", spec.kind, spec.name),
                        locus,
                    ));
                    continue;
                }
            };
        let successors = spec.forward_to.iter().map(|t| index[t.as_str()]).collect();
        nodes.push(PlanNode { spec: spec.clone(), binding, service, successors });
    }
    if !diags.is_empty() {
        return Err(CompileError(diags));
    }

    let order = topological_order(&nodes);
    let entry_items = nodes
        .iter()
        .flat_map(|n| {
            n.spec.inline_data.iter().map(|d| (n.spec.name.clone(), Item::new(seed_payload(d)).from_op(&n.spec.name)))
        })
        .collect();
    Ok(ExecutablePlan { network: net.clone(), nodes, order, entry_items, options: options.clone() })
}

/// Kahn's algorithm, always releasing the lowest ready index first.
fn topological_order(nodes: &[PlanNode]) -> Vec<usize> {
    let mut indegree = vec![0usize; nodes.len()];
    for n in nodes {
        for &s in &n.successors {
            indegree[s] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..nodes.len()).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &s in &nodes[i].successors {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                ready.push(Reverse(s));
            }
        }
    }
    order
}
