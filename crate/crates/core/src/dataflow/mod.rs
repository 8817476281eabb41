//! Items, service registry, plan compilation and the stepwise engine.

mod engine;
mod item;
mod plan;
mod registry;

pub use engine::{
    apply_reconfiguration, execute, reconfig_diagnostics, Counters, Engine, ReconfigError, ReconfigOutcome, RunReport,
};
pub use item::{seed_payload, HttpRequest, HttpResponse, Item, Method, Payload, Record};
pub use plan::{binding_for, codes, compile, CompileError, CompileOptions, ExecutablePlan, PlanNode};
pub use registry::{Action, AttachedService, ReconfigurationPlan, RegistryError, ServiceRegistry};
