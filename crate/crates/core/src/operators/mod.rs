mod extract;
mod filter;
mod http;
mod parse;
mod path;
mod service;
mod sink;
mod template;
mod transform;

pub use extract::{extract, Extractor, RegexExtractor};
pub use filter::{filter_items, select, Conjunct, Predicate, Test};
pub use http::{
    build_http_query, fetch, normalize_url, query_service, Endpoint, FetchMode, FixtureError, FixtureStore, LiveConfig,
};
pub use parse::{parse_document, Format};
pub use path::{Axis, PathExpression, PathValue, Step, Terminal};
pub use service::{ConfigError, Effects, QueryConfig, Service};
pub use sink::{one_line, sink_record, sql_quote, SinkConfig, SinkMode, SinkResult};
pub use template::{record_json, MissingField, Segment, Template};
pub use transform::transform;
