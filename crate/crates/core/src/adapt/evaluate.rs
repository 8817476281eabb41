use super::{AdaptError, CompareOp, Condition, Policy, PropertyStore, Rule, Value};
use crate::dataflow::{Action, ReconfigurationPlan, ServiceRegistry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("property '{0}' is not set")]
    MissingProperty(String),
    #[error("cannot compare {left} with {right} using {op}")]
    TypeMismatch { op: &'static str, left: &'static str, right: &'static str },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unevaluable {
    /// Index of the rule in its policy.
    pub rule: usize,
    pub reason: EvalError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub policy: String,
    /// Triggered rules, in policy order.
    pub triggered: Vec<Rule>,
    pub unevaluable: Vec<Unevaluable>,
}

impl Condition {
    /// Strict comparison. Ordering needs two numbers; equality needs two
    /// values of the same type.
    pub fn holds(&self, props: &PropertyStore) -> Result<bool, EvalError> {
        let left = props.get(&self.left).ok_or_else(|| EvalError::MissingProperty(self.left.clone()))?;
        let mismatch =
            || EvalError::TypeMismatch { op: self.op.as_str(), left: left.type_name(), right: self.right.type_name() };
        match (self.op, left, &self.right) {
            (CompareOp::LessThan, Value::Number(a), Value::Number(b)) => Ok(a < b),
            (CompareOp::GreaterThan, Value::Number(a), Value::Number(b)) => Ok(a > b),
            (CompareOp::Equals, Value::Number(a), Value::Number(b)) => Ok(a == b),
            (CompareOp::Equals, Value::Text(a), Value::Text(b)) => Ok(a == b),
            _ => Err(mismatch()),
        }
    }
}

/// Evaluate every rule. Rules that cannot be evaluated are reported, never
/// counted as false.
pub fn evaluate(policy: &Policy, props: &PropertyStore) -> Evaluation {
    let mut eval = Evaluation { policy: policy.name.clone(), triggered: Vec::new(), unevaluable: Vec::new() };
    for (i, rule) in policy.rules.iter().enumerate() {
        match rule.when.holds(props) {
            Ok(true) => eval.triggered.push(rule.clone()),
            Ok(false) => {}
            Err(reason) => eval.unevaluable.push(Unevaluable { rule: i, reason }),
        }
    }
    eval
}

impl Evaluation {
    /// Triggered actions in rule order, repeats dropped. Not checked
    /// against any registry.
    pub fn actions(&self) -> ReconfigurationPlan {
        let mut actions: Vec<Action> = Vec::new();
        for a in self.triggered.iter().flat_map(|r| &r.ensure) {
            if !actions.contains(a) {
                actions.push(a.clone());
            }
        }
        ReconfigurationPlan { policy: self.policy.clone(), actions }
    }
}

/// [`Evaluation::actions`], checked in order against a copy of `registry`.
/// Any failing action rejects the plan.
pub fn plan_actions(eval: &Evaluation, registry: &ServiceRegistry) -> Result<ReconfigurationPlan, AdaptError> {
    let plan = eval.actions();
    registry.apply_all(&plan.actions).map_err(AdaptError::Rejected)?;
    Ok(plan)
}
