use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::wetdl::{OperatorKind, Params};

/// A service attached to a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachedService {
    /// Operator kind the service provides; `None` for services outside the
    /// extraction vocabulary.
    #[serde(default)]
    pub kind: Option<OperatorKind>,
    #[serde(default)]
    pub params: Params,
    /// Parameters set by updates. They are also written into `params`, and
    /// overwrite same-named operator parameters at compile time.
    #[serde(default)]
    pub overrides: Params,
}

impl AttachedService {
    pub fn named(name: &str, params: Params) -> Self {
        AttachedService { kind: name.parse().ok(), params, overrides: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum Action {
    Detach {
        service: String,
    },
    Attach {
        service: String,
        #[serde(default)]
        params: Params,
    },
    Update {
        service: String,
        #[serde(default)]
        params: Params,
    },
}

impl Action {
    pub fn service(&self) -> &str {
        match self {
            Action::Detach { service } | Action::Attach { service, .. } | Action::Update { service, .. } => service,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, service, params) = match self {
            Action::Detach { service } => ("Detach", service, &[][..]),
            Action::Attach { service, params } => ("Attach", service, &params[..]),
            Action::Update { service, params } => ("Update", service, &params[..]),
        };
        write!(f, "{name}({service}")?;
        for (k, v) in params {
            write!(f, ", {k}={v}")?;
        }
        f.write_str(")")
    }
}

/// Ordered actions produced by one policy.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReconfigurationPlan {
    pub policy: String,
    pub actions: Vec<Action>,
}

impl ReconfigurationPlan {
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("service '{0}' is not attached")]
    UnknownService(String),
    #[error("service '{0}' is already attached")]
    DupService(String),
}

impl RegistryError {
    pub fn code(&self) -> &'static str {
        match self {
            RegistryError::UnknownService(_) => "UNKNOWN_SERVICE",
            RegistryError::DupService(_) => "DUP_SERVICE",
        }
    }
}

fn set_param(params: &mut Params, key: &str, value: &str) {
    match params.iter_mut().find(|(k, _)| k == key) {
        Some(slot) => slot.1 = value.to_string(),
        None => params.push((key.to_string(), value.to_string())),
    }
}

/// Services attached to one session, in attachment order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ServiceRegistry {
    pub session: String,
    pub attached: IndexMap<String, AttachedService>,
}

impl ServiceRegistry {
    pub fn new(session: impl Into<String>) -> Self {
        ServiceRegistry { session: session.into(), attached: IndexMap::new() }
    }

    /// One service per operator kind except dummy, which needs none.
    pub fn builtin() -> Self {
        let mut r = ServiceRegistry::new("default");
        for kind in OperatorKind::ALL.into_iter().filter(|k| *k != OperatorKind::Dummy) {
            r.attached.insert(kind.to_string(), AttachedService::named(kind.as_str(), Vec::new()));
        }
        r
    }

    pub fn with_services(session: &str, names: &[&str]) -> Self {
        let mut r = ServiceRegistry::new(session);
        for n in names {
            r.attached.insert(n.to_string(), AttachedService::named(n, Vec::new()));
        }
        r
    }

    pub fn names(&self) -> Vec<&str> {
        self.attached.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.attached.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<&AttachedService> {
        self.attached.get(name)
    }

    /// Apply one action in place. On error the registry is unchanged.
    pub fn apply(&mut self, action: &Action) -> Result<(), RegistryError> {
        match action {
            Action::Detach { service } => {
                self.attached.shift_remove(service).ok_or_else(|| RegistryError::UnknownService(service.clone()))?;
            }
            Action::Attach { service, params } => {
                if self.attached.contains_key(service) {
                    return Err(RegistryError::DupService(service.clone()));
                }
                self.attached.insert(service.clone(), AttachedService::named(service, params.clone()));
            }
            Action::Update { service, params } => {
                let entry =
                    self.attached.get_mut(service).ok_or_else(|| RegistryError::UnknownService(service.clone()))?;
                for (k, v) in params {
                    set_param(&mut entry.params, k, v);
                    set_param(&mut entry.overrides, k, v);
                }
            }
        }
        Ok(())
    }

    /// Apply every action or none.
    pub fn apply_all(&self, actions: &[Action]) -> Result<ServiceRegistry, Vec<(Action, RegistryError)>> {
        let mut next = self.clone();
        let mut failures = Vec::new();
        for a in actions {
            if let Err(e) = next.apply(a) {
                failures.push((a.clone(), e));
            }
        }
        if failures.is_empty() {
            Ok(next)
        } else {
            Err(failures)
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("registry serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
