use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;

use super::AdaptError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl Value {
    /// Numeric when the literal parses as a finite number, text otherwise.
    pub fn infer(literal: &str) -> Value {
        match literal.trim().parse::<f64>() {
            Ok(n) if n.is_finite() => Value::Number(n),
            _ => Value::Text(literal.trim().to_string()),
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Text(_) => "string",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

/// Property path → value, in insertion order. Paths are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropertyStore {
    values: IndexMap<String, Value>,
}

impl PropertyStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, path: &str, value: Value) -> Self {
        self.set(path, value);
        self
    }

    /// Insert or replace.
    pub fn set(&mut self, path: &str, value: Value) {
        self.values.insert(path.to_string(), value);
    }

    pub fn get(&self, path: &str) -> Option<&Value> {
        self.values.get(path)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One `path = value` per line. Blank lines and lines starting with `#`
/// are skipped; a path may appear once.
impl FromStr for PropertyStore {
    type Err = AdaptError;

    fn from_str(text: &str) -> Result<Self, AdaptError> {
        let mut store = PropertyStore::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: &str| AdaptError::BadProperty { line: i + 1, message: message.to_string() };
            let (path, value) = line.split_once('=').ok_or_else(|| bad("expected 'path = value'"))?;
            let path = path.trim();
            if path.is_empty() {
                return Err(bad("empty property path"));
            }
            if store.values.contains_key(path) {
                return Err(AdaptError::DupProperty(path.to_string()));
            }
            store.set(path, Value::infer(value));
        }
        Ok(store)
    }
}
