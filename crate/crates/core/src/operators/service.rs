use std::path::Path;
use std::sync::Arc;

use super::extract::{extract, Extractor, RegexExtractor};
use super::filter::{filter_items, Predicate};
use super::http::{build_http_query, fetch, query_service, Endpoint, FetchMode};
use super::parse::{parse_document, Format};
use super::sink::{one_line, sink_record, SinkConfig, SinkMode};
use super::template::Template;
use super::transform::transform;
use crate::dataflow::{Item, Method, Payload};
use crate::ierel::Wrapper;
use crate::wetdl::{OperatorKind, Params, MAP_PARAM};

/// Parameters of a query operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryConfig {
    pub endpoint: Endpoint,
    /// Static key/value pairs, in declaration order.
    pub pairs: Params,
    /// Pair that receives the input item's text when it is non-empty.
    pub input_key: Option<String>,
    /// Emit the request instead of fetching it.
    pub build_only: bool,
}

/// A configured operator, ready to be invoked on items.
#[derive(Debug, Clone)]
pub enum Service {
    Dummy,
    Query(QueryConfig),
    Fetch { method: Option<Method> },
    Parse(Format),
    Filter(Predicate),
    Extract(Extractor),
    Transform(Template),
    Db(SinkConfig),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("missing required parameter '{0}'")]
    Missing(String),
    #[error("invalid parameter '{param}': {message}")]
    Invalid { param: String, message: String },
}

fn get<'a>(params: &'a Params, key: &str) -> Option<&'a str> {
    params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn invalid(param: &str, message: impl ToString) -> ConfigError {
    ConfigError::Invalid { param: param.to_string(), message: message.to_string() }
}

impl Service {
    /// Build the service for `kind` from its parameters.
    ///
    /// Schemas:
    /// - query: `url` (required), `method`, `input`, `build-only`; any other
    ///   parameter is a query pair.
    /// - fetch: `method`.
    /// - parse: `format` (`xml` or `html`, default `html`).
    /// - filter: every parameter is a conjunct `selector = [op:]literal`.
    /// - extract: `path`, or `regexp` with optional `map`, or `headers`
    ///   (comma-separated), or `wrapper` (file path).
    /// - transform: `template` (required).
    /// - db: `mode` (`statement` or `jsonl`), `output`; statement mode
    ///   renders the query template on one line.
    ///
    /// Relative file paths resolve against `base_dir`.
    pub fn configure(
        kind: OperatorKind,
        params: &Params,
        query_template: Option<&str>,
        base_dir: Option<&Path>,
    ) -> Result<Service, ConfigError> {
        let service = match kind {
            OperatorKind::Dummy => Service::Dummy,
            OperatorKind::Query => {
                let url = get(params, "url").ok_or_else(|| ConfigError::Missing("url".into()))?;
                let method = match get(params, "method") {
                    Some(m) => m.parse().map_err(|e| invalid("method", e))?,
                    None => Method::Get,
                };
                let build_only = match get(params, "build-only") {
                    None | Some("false") | Some("no") => false,
                    Some("true") | Some("yes") => true,
                    Some(other) => return Err(invalid("build-only", format!("expected true or false, got '{other}'"))),
                };
                let pairs = params
                    .iter()
                    .filter(|(k, _)| !matches!(k.as_str(), "url" | "method" | "input" | "build-only"))
                    .cloned()
                    .collect();
                Service::Query(QueryConfig {
                    endpoint: Endpoint::new(url, method),
                    pairs,
                    input_key: get(params, "input").map(str::to_string),
                    build_only,
                })
            }
            OperatorKind::Fetch => Service::Fetch {
                method: get(params, "method").map(|m| m.parse().map_err(|e| invalid("method", e))).transpose()?,
            },
            OperatorKind::Parse => Service::Parse(match get(params, "format") {
                Some(f) => f.parse().map_err(|e| invalid("format", e))?,
                None => Format::default(),
            }),
            OperatorKind::Filter => Service::Filter(Predicate::from_params(params).map_err(|e| invalid("filter", e))?),
            OperatorKind::Extract => Service::Extract(extractor(params, base_dir)?),
            OperatorKind::Transform => {
                let t = get(params, "template").ok_or_else(|| ConfigError::Missing("template".into()))?;
                Service::Transform(t.parse().map_err(|e| invalid("template", e))?)
            }
            OperatorKind::Db => {
                let mode = match (get(params, "mode"), query_template) {
                    (Some("jsonl"), _) | (None, None) => SinkMode::Jsonl,
                    (Some("statement"), None) => return Err(ConfigError::Missing("query".into())),
                    (Some("statement") | None, Some(q)) => {
                        SinkMode::Statement(one_line(q).parse().map_err(|e| invalid("query", e))?)
                    }
                    (Some(other), _) => {
                        return Err(invalid("mode", format!("expected statement or jsonl, got '{other}'")))
                    }
                };
                Service::Db(SinkConfig { mode, output: get(params, "output").map(Into::into) })
            }
        };
        Ok(service)
    }

    /// Apply the service to one item. Sink lines and warnings go to `fx`.
    pub fn invoke(&self, input: &Item, mode: &FetchMode, fx: &mut Effects) -> Vec<Item> {
        match self {
            Service::Dummy => vec![input.clone()],
            Service::Query(q) => {
                let mut pairs = q.pairs.clone();
                if let Some(key) = &q.input_key {
                    let text = match &input.payload {
                        Payload::Text(t) | Payload::Url(t) => t.trim().to_string(),
                        _ => String::new(),
                    };
                    if !text.is_empty() {
                        match pairs.iter_mut().find(|(k, _)| k == key) {
                            Some(pair) => pair.1 = text,
                            None => pairs.push((key.clone(), text)),
                        }
                    }
                }
                if q.build_only {
                    build_http_query(q.endpoint.method, &q.endpoint.url, &pairs)
                } else {
                    query_service(&pairs, &q.endpoint, mode)
                }
            }
            Service::Fetch { method } => fetch(input, mode, *method),
            Service::Parse(format) => parse_document(input, *format),
            Service::Filter(p) => filter_items(input, p),
            Service::Extract(e) => extract(input, e),
            Service::Transform(t) => match transform(input, t) {
                Ok(items) => items,
                Err(missing) => {
                    fx.warnings.push(format!("field '{}' is missing", missing.0));
                    Vec::new()
                }
            },
            Service::Db(cfg) => {
                let result = sink_record(input, cfg);
                for m in result.missing {
                    fx.warnings.push(format!("field '{m}' is missing; rendered empty"));
                }
                fx.line = result.line;
                result.passed
            }
        }
    }
}

fn extractor(params: &Params, base_dir: Option<&Path>) -> Result<Extractor, ConfigError> {
    if let Some(p) = get(params, "path") {
        return Ok(Extractor::Path(p.parse().map_err(|e| invalid("path", e))?));
    }
    if let Some(re) = get(params, "regexp") {
        let keys: Vec<String> = match get(params, MAP_PARAM) {
            Some(m) => m.split('\n').map(str::trim).filter(|k| !k.is_empty()).map(str::to_string).collect(),
            None => {
                let groups = regex::Regex::new(re).map_err(|e| invalid("regexp", e))?.captures_len() - 1;
                (1..=groups).map(|i| i.to_string()).collect()
            }
        };
        return Ok(Extractor::Regex(RegexExtractor::new(re, keys).map_err(|e| invalid("regexp", e))?));
    }
    if let Some(h) = get(params, "headers") {
        let names = h.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect();
        return Ok(Extractor::Headers(names));
    }
    if let Some(w) = get(params, "wrapper") {
        let path = match base_dir {
            Some(dir) => dir.join(w),
            None => w.into(),
        };
        let text =
            std::fs::read_to_string(&path).map_err(|e| invalid("wrapper", format!("{}: {e}", path.display())))?;
        let wrapper = Wrapper::from_json(&text).map_err(|e| invalid("wrapper", e))?;
        return Ok(Extractor::Wrapper(Arc::new(wrapper)));
    }
    Err(ConfigError::Missing("path".into()))
}

/// Side outputs of one invocation.
#[derive(Debug, Default)]
pub struct Effects {
    pub warnings: Vec<String>,
    /// Line produced by a sink.
    pub line: Option<String>,
}
