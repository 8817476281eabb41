use super::{AdaptError, ExtractionDirective};
use crate::dataflow::{Action, Item, Method, Payload, ReconfigurationPlan, ServiceRegistry};
use crate::operators::{fetch, FetchMode};
use crate::wetdl::{parse_task, validate_network, Diagnostic, OperatorKind, Params, TaskNetwork};

#[derive(Debug, Clone)]
pub struct ExtractionAnalysis {
    /// The task the directive installs.
    pub task: TaskNetwork,
    pub plan: ReconfigurationPlan,
}

/// Services a task needs, in operator order, each with the parameters of
/// the first operator that needs it. An operator needs the registry entry
/// named after it when one exists, else the entry named after its kind.
pub fn required_services(task: &TaskNetwork, registry: &ServiceRegistry) -> Vec<(String, Params)> {
    let mut out: Vec<(String, Params)> = Vec::new();
    for op in task.operators.iter().filter(|o| o.kind != OperatorKind::Dummy) {
        let name = if registry.contains(&op.name) { op.name.as_str() } else { op.kind.as_str() };
        if !out.iter().any(|(n, _)| n == name) {
            out.push((name.to_string(), op.params.clone()));
        }
    }
    out
}

/// Fetch the directive's WetDL file and plan the registry changes it needs:
/// detach every attached service the task does not use, in registry order,
/// then attach every missing one, in task order.
pub fn analyze_extraction_directive(
    d: &ExtractionDirective,
    mode: &FetchMode,
    registry: &ServiceRegistry,
) -> Result<ExtractionAnalysis, AdaptError> {
    let location = d.wdl_location();
    let body = fetch(&Item::url(location.as_str()), mode, Some(Method::Get))
        .into_iter()
        .find_map(|i| match i.payload {
            Payload::HttpResponse(r) => Some(r.body_text()),
            _ => None,
        })
        .ok_or_else(|| AdaptError::FetchFailed(location.clone()))?;
    let task = parse_task(&body).map_err(|e| AdaptError::InvalidWetdl(e.diagnostics()))?;
    let errors: Vec<Diagnostic> = validate_network(&task).into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(AdaptError::InvalidWetdl(errors));
    }

    let required = required_services(&task, registry);
    let mut actions: Vec<Action> = registry
        .names()
        .into_iter()
        .filter(|n| !required.iter().any(|(r, _)| r == n))
        .map(|n| Action::Detach { service: n.to_string() })
        .collect();
    actions.extend(
        required
            .into_iter()
            .filter(|(n, _)| !registry.contains(n))
            .map(|(service, params)| Action::Attach { service, params }),
    );
    Ok(ExtractionAnalysis { task, plan: ReconfigurationPlan { policy: d.name.clone(), actions } })
}
