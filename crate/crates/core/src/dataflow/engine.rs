use std::collections::VecDeque;
use std::time::Instant;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::{json, Value};

use super::item::Item;
use super::plan::{compile, CompileError, ExecutablePlan};
use super::registry::{Action, ReconfigurationPlan, RegistryError, ServiceRegistry};
use crate::operators::{Effects, FetchMode, Service};
use crate::wetdl::{Diagnostic, OperatorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counters {
    pub items_in: usize,
    pub items_out: usize,
    pub errors: usize,
    pub warnings: usize,
    /// Queued items dropped because the node was detached.
    pub discarded: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub source: String,
    /// Per operator, in network order. Detached operators keep their entry.
    pub operators: IndexMap<String, (OperatorKind, Counters)>,
    /// Items emitted by operators without successors, in emission order.
    pub outputs: Vec<Item>,
    /// Lines written by each sink.
    pub sinks: IndexMap<String, Vec<String>>,
    pub wall_time: std::time::Duration,
}

impl RunReport {
    pub fn counters(&self, op: &str) -> Counters {
        self.operators.get(op).map(|(_, c)| *c).unwrap_or_default()
    }

    /// Stable JSON. Wall time is included only when asked for, so default
    /// reports of identical runs are byte-identical.
    pub fn to_json(&self, with_wall_time: bool) -> String {
        let operators: serde_json::Map<String, Value> = self
            .operators
            .iter()
            .map(|(name, (kind, c))| {
                (
                    name.clone(),
                    json!({
                        "kind": kind.as_str(),
                        "items_in": c.items_in,
                        "items_out": c.items_out,
                        "errors": c.errors,
                        "warnings": c.warnings,
                        "discarded": c.discarded,
                    }),
                )
            })
            .collect();
        let mut doc = json!({
            "source": self.source,
            "operators": operators,
            "outputs": self.outputs.iter().map(Item::to_json).collect::<Vec<_>>(),
            "sinks": self.sinks,
        });
        if with_wall_time {
            doc["wall_time_ms"] = json!(self.wall_time.as_secs_f64() * 1000.0);
        }
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ReconfigError {
    #[error("{}", .0.iter().map(|(a, e)| format!("{a}: {e}")).collect::<Vec<_>>().join("; "))]
    Registry(Vec<(Action, RegistryError)>),
    #[error(transparent)]
    Invalid(#[from] CompileError),
}

impl ReconfigError {
    pub fn codes(&self) -> Vec<String> {
        match self {
            ReconfigError::Registry(f) => f.iter().map(|(_, e)| e.code().to_string()).collect(),
            ReconfigError::Invalid(c) => c.0.iter().map(|d| d.code.clone()).collect(),
        }
    }
}

/// Apply `rplan` to a plan and its registry without touching either.
///
/// Detached services leave the registry, and operators bound to them leave
/// the network along with every edge into them. Attached services join the
/// registry. Updates overwrite named parameters. The result is recompiled;
/// any failure rejects the whole plan.
pub fn apply_reconfiguration(
    plan: &ExecutablePlan,
    registry: &ServiceRegistry,
    rplan: &ReconfigurationPlan,
) -> Result<(ExecutablePlan, ServiceRegistry), ReconfigError> {
    if rplan.is_empty() {
        return Ok((plan.clone(), registry.clone()));
    }
    let next_registry = registry.apply_all(&rplan.actions).map_err(ReconfigError::Registry)?;
    let detached: Vec<&str> = plan
        .nodes
        .iter()
        .filter(|n| n.binding.as_deref().is_some_and(|b| !next_registry.contains(b)))
        .map(|n| n.name())
        .collect();
    let mut net = plan.network.clone();
    net.operators.retain(|o| !detached.contains(&o.name.as_str()));
    for o in &mut net.operators {
        o.forward_to.retain(|t| !detached.contains(&t.as_str()));
    }
    let next_plan = compile(&net, &next_registry, &plan.options)?;
    Ok((next_plan, next_registry))
}

/// Outcome of a reconfiguration applied between steps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReconfigOutcome {
    pub removed: Vec<String>,
    pub discarded: usize,
}

/// Stepwise executor. Each step moves one item through one operator; the
/// engine is quiescent between steps.
pub struct Engine {
    plan: ExecutablePlan,
    registry: ServiceRegistry,
    fetch: FetchMode,
    queues: IndexMap<String, VecDeque<Item>>,
    counters: IndexMap<String, (OperatorKind, Counters)>,
    outputs: Vec<Item>,
    sinks: IndexMap<String, Vec<String>>,
    trace: Option<Vec<String>>,
    started: Option<Instant>,
}

impl Engine {
    pub fn new(plan: ExecutablePlan, registry: ServiceRegistry, fetch: FetchMode) -> Self {
        let queues = plan.nodes.iter().map(|n| (n.name().to_string(), VecDeque::new())).collect();
        let counters = plan.nodes.iter().map(|n| (n.name().to_string(), (n.kind(), Counters::default()))).collect();
        let sinks = plan
            .nodes
            .iter()
            .filter(|n| matches!(n.service, Service::Db(_)))
            .map(|n| (n.name().to_string(), Vec::new()))
            .collect();
        Engine { plan, registry, fetch, queues, counters, outputs: Vec::new(), sinks, trace: None, started: None }
    }

    /// Record one `<op> <in|out|err> <kind>` line per delivery.
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn trace(&self) -> &[String] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn plan(&self) -> &ExecutablePlan {
        &self.plan
    }

    pub fn registry(&self) -> &ServiceRegistry {
        &self.registry
    }

    fn log(&mut self, op: &str, dir: &str, kind: &str) {
        if let Some(t) = &mut self.trace {
            t.push(format!("{op} {dir} {kind}"));
        }
    }

    fn counter(&mut self, op: &str) -> &mut Counters {
        &mut self.counters.get_mut(op).expect("known operator").1
    }

    /// Route an item emitted by node `from`.
    fn emit(&mut self, from: usize, item: Item) {
        let name = self.plan.nodes[from].name().to_string();
        let item = item.from_op(&name);
        self.counter(&name).items_out += 1;
        self.log(&name, "out", item.kind());
        let succ = self.plan.nodes[from].successors.clone();
        if succ.is_empty() {
            self.outputs.push(item);
        } else {
            for s in succ {
                let target = self.plan.nodes[s].name().to_string();
                self.queues.get_mut(&target).expect("known operator").push_back(item.clone());
            }
        }
    }

    /// Emit dummy data and hand caller input to the entry points without
    /// data. With no caller input, those entry points get one empty text
    /// item as a trigger.
    pub fn seed(&mut self, initial: Vec<Item>) {
        self.started.get_or_insert_with(Instant::now);
        for (op, item) in self.plan.entry_items.clone() {
            let idx = self.plan.index_of(&op).expect("entry item from known operator");
            self.emit(idx, item);
        }
        let initial = if initial.is_empty() { vec![Item::text("")] } else { initial };
        for idx in self.plan.entry_points() {
            if !self.plan.nodes[idx].spec.inline_data.is_empty() {
                continue;
            }
            let name = self.plan.nodes[idx].name().to_string();
            self.queues.get_mut(&name).expect("known operator").extend(initial.iter().cloned());
        }
    }

    /// Process one queued item. Returns `false` when every queue is empty.
    pub fn step(&mut self) -> bool {
        let Some(idx) = self.plan.order.iter().copied().find(|&i| !self.queues[self.plan.nodes[i].name()].is_empty())
        else {
            return false;
        };
        let name = self.plan.nodes[idx].name().to_string();
        let item = self.queues.get_mut(&name).and_then(VecDeque::pop_front).expect("non-empty queue");
        self.counter(&name).items_in += 1;
        self.log(&name, "in", item.kind());

        let mut fx = Effects::default();
        let out = self.plan.nodes[idx].service.invoke(&item, &self.fetch, &mut fx);
        self.counter(&name).warnings += fx.warnings.len();
        if let Some(line) = fx.line {
            self.sinks.entry(name.clone()).or_default().push(line);
        }
        if out.is_empty() {
            self.counter(&name).errors += 1;
            self.log(&name, "err", item.kind());
        }
        for o in out {
            self.emit(idx, o);
        }
        true
    }

    pub fn is_quiescent(&self) -> bool {
        self.queues.values().all(VecDeque::is_empty)
    }

    /// Apply a reconfiguration between steps, all or nothing. Items queued
    /// for removed operators are discarded and counted.
    pub fn reconfigure(&mut self, rplan: &ReconfigurationPlan) -> Result<ReconfigOutcome, ReconfigError> {
        let (plan, registry) = apply_reconfiguration(&self.plan, &self.registry, rplan)?;
        let mut outcome = ReconfigOutcome::default();
        let kept: Vec<String> = plan.nodes.iter().map(|n| n.name().to_string()).collect();
        let removed: Vec<String> = self.queues.keys().filter(|k| !kept.contains(k)).cloned().collect();
        for name in removed {
            let dropped = self.queues.shift_remove(&name).map_or(0, |q| q.len());
            self.counter(&name).discarded += dropped;
            outcome.discarded += dropped;
            outcome.removed.push(name);
        }
        for n in &plan.nodes {
            if matches!(n.service, Service::Db(_)) {
                self.sinks.entry(n.name().to_string()).or_default();
            }
        }
        self.plan = plan;
        self.registry = registry;
        Ok(outcome)
    }

    pub fn report(&self) -> RunReport {
        RunReport {
            source: self.plan.network.source_name.clone(),
            operators: self.counters.clone(),
            outputs: self.outputs.clone(),
            sinks: self.sinks.clone(),
            wall_time: self.started.map(|t| t.elapsed()).unwrap_or_default(),
        }
    }

    /// Seed, drain and report.
    pub fn run(&mut self, initial: Vec<Item>) -> RunReport {
        self.seed(initial);
        while self.step() {}
        self.report()
    }

    /// Write each sink's lines to its configured output file, LF-terminated.
    pub fn write_sink_files(&self) -> std::io::Result<Vec<std::path::PathBuf>> {
        let mut written = Vec::new();
        for n in &self.plan.nodes {
            if let Service::Db(cfg) = &n.service {
                if let Some(path) = &cfg.output {
                    let lines = self.sinks.get(n.name()).map(Vec::as_slice).unwrap_or(&[]);
                    let mut text = lines.join("\n");
                    if !text.is_empty() {
                        text.push('\n');
                    }
                    std::fs::write(path, text)?;
                    written.push(path.clone());
                }
            }
        }
        Ok(written)
    }
}

/// Run a compiled plan to completion against the builtin registry.
pub fn execute(plan: &ExecutablePlan, initial: Vec<Item>, fetch: &FetchMode) -> RunReport {
    Engine::new(plan.clone(), ServiceRegistry::builtin(), fetch.clone()).run(initial)
}

/// Diagnostics of a failed reconfiguration, for display.
pub fn reconfig_diagnostics(e: &ReconfigError) -> Vec<Diagnostic> {
    match e {
        ReconfigError::Registry(f) => f
            .iter()
            .map(|(a, err)| Diagnostic::error(err.code(), format!("{a}: {err}"), crate::wetdl::Locus::Network))
            .collect(),
        ReconfigError::Invalid(c) => c.0.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataflow::{CompileOptions, Payload};
    use crate::wetdl::{OperatorKind::*, OperatorSpec, TaskNetwork};

    fn plan(net: &TaskNetwork) -> ExecutablePlan {
        compile(net, &ServiceRegistry::builtin(), &CompileOptions::default()).unwrap()
    }

    #[test]
    fn dummy_to_transform_passes_data_through() {
        let net = TaskNetwork::new("s")
            .with(OperatorSpec::new(Dummy, "d").forward(&["t"]).data("hello world"))
            .with(OperatorSpec::new(Transform, "t").param("template", "$_text"));
        let report = execute(&plan(&net), vec![], &FetchMode::empty());
        assert_eq!(report.outputs.len(), 1);
        assert_eq!(report.outputs[0].payload, Payload::Text("hello world".into()));
        assert_eq!(report.outputs[0].provenance, "t");
        assert_eq!(report.counters("d").items_out, 1);
    }

    #[test]
    fn fetch_error_is_isolated() {
        let net = TaskNetwork::new("s")
            .with(OperatorSpec::new(Dummy, "d").forward(&["f"]).data("http://nowhere.example/"))
            .with(OperatorSpec::new(Fetch, "f").forward(&["p"]))
            .with(OperatorSpec::new(Parse, "p"));
        let report = execute(&plan(&net), vec![], &FetchMode::empty());
        assert_eq!(report.counters("f").errors, 1);
        assert_eq!(report.counters("p").items_in, 0);
    }

    #[test]
    fn fan_out_in_declaration_order_and_trace() {
        let net = TaskNetwork::new("s")
            .with(OperatorSpec::new(Dummy, "d").forward(&["b", "a"]).data("x"))
            .with(OperatorSpec::new(Transform, "a").param("template", "a:$_text"))
            .with(OperatorSpec::new(Transform, "b").param("template", "b:$_text"));
        let mut engine = Engine::new(plan(&net), ServiceRegistry::builtin(), FetchMode::empty());
        engine.enable_trace();
        let report = engine.run(vec![]);
        let texts: Vec<String> = report.outputs.iter().filter_map(|i| i.payload.text()).collect();
        assert_eq!(texts, vec!["a:x", "b:x"]);
        assert_eq!(engine.trace()[0], "d out text");
        assert!(engine.trace().contains(&"b in text".to_string()));
    }

    #[test]
    fn report_json_is_stable() {
        let net = TaskNetwork::new("s")
            .with(OperatorSpec::new(Dummy, "d").forward(&["t"]).data("x"))
            .with(OperatorSpec::new(Transform, "t").param("template", "$_text"));
        let p = plan(&net);
        let a = execute(&p, vec![], &FetchMode::empty()).to_json(false);
        let b = execute(&p, vec![], &FetchMode::empty()).to_json(false);
        assert_eq!(a, b);
        assert!(!a.contains("wall_time"));
    }

    #[test]
    fn caller_input_and_trigger() {
        let net = TaskNetwork::new("s").with(OperatorSpec::new(Transform, "t").param("template", "[$_text]"));
        let p = plan(&net);
        let r = execute(&p, vec![Item::text("a"), Item::text("b")], &FetchMode::empty());
        assert_eq!(r.outputs.len(), 2);
        let r = execute(&p, vec![], &FetchMode::empty());
        assert_eq!(r.outputs[0].payload, Payload::Text("[]".into()));
    }

    #[test]
    fn reconfiguration_between_steps_discards_queued_items() {
        let net = TaskNetwork::new("s")
            .with(OperatorSpec::new(Dummy, "d").forward(&["t"]).data("1").data("2"))
            .with(OperatorSpec::new(Transform, "t").param("template", "$_text"));
        let mut engine = Engine::new(plan(&net), ServiceRegistry::builtin(), FetchMode::empty());
        engine.seed(vec![]);
        assert!(engine.step());
        let rplan =
            ReconfigurationPlan { policy: "p".into(), actions: vec![Action::Detach { service: "transform".into() }] };
        let outcome = engine.reconfigure(&rplan).unwrap();
        assert_eq!(outcome, ReconfigOutcome { removed: vec!["t".into()], discarded: 1 });
        let report = engine.report();
        assert_eq!(report.counters("t").items_in, 1);
        assert_eq!(report.counters("t").discarded, 1);
        assert!(!engine.step());
    }

    #[test]
    fn rejected_reconfiguration_keeps_state() {
        let net = TaskNetwork::new("s").with(OperatorSpec::new(Fetch, "f"));
        let p = plan(&net);
        let reg = ServiceRegistry::builtin();
        let twice = ReconfigurationPlan {
            policy: "p".into(),
            actions: vec![Action::Detach { service: "VideoService".into() }; 2],
        };
        let err = apply_reconfiguration(&p, &reg, &twice).unwrap_err();
        assert_eq!(err.codes(), vec!["UNKNOWN_SERVICE", "UNKNOWN_SERVICE"]);

        let (same_plan, same_reg) = apply_reconfiguration(&p, &reg, &ReconfigurationPlan::default()).unwrap();
        assert_eq!(same_reg, reg);
        assert_eq!(same_plan.network, p.network);
    }
}
