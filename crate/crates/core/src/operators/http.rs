use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::dataflow::{HttpRequest, HttpResponse, Item, Method, Payload};

/// Build the single request item for `method base_url` with `pairs`.
///
/// GET and HEAD carry the pairs in the query string, POST in a form body.
/// With no pairs the base URL is kept byte for byte.
pub fn build_http_query(method: Method, base_url: &str, pairs: &[(String, String)]) -> Vec<Item> {
    let Ok(parsed) = url::Url::parse(base_url) else {
        return Vec::new();
    };
    if !parsed.has_host() || parsed.fragment().is_some() {
        return Vec::new();
    }
    let encoded = || {
        let mut ser = form_urlencoded::Serializer::new(String::new());
        for (k, v) in pairs {
            ser.append_pair(k, v);
        }
        ser.finish()
    };
    let request = match method {
        Method::Get | Method::Head => {
            let url = if pairs.is_empty() {
                base_url.to_string()
            } else {
                let sep = match parsed.query() {
                    None => "?",
                    Some("") => "",
                    Some(_) => "&",
                };
                format!("{base_url}{sep}{}", encoded())
            };
            HttpRequest { method, url, headers: Vec::new(), body: Vec::new() }
        }
        Method::Post => HttpRequest {
            method,
            url: base_url.to_string(),
            headers: vec![("content-type".to_string(), "application/x-www-form-urlencoded".to_string())],
            body: encoded().into_bytes(),
        },
    };
    vec![Item::new(Payload::HttpRequest(request))]
}

/// Canonical fixture key form of a URL: lowercase scheme and host, default
/// port dropped, query order kept. `None` for relative or unparsable input.
pub fn normalize_url(raw: &str) -> Option<String> {
    let mut u = url::Url::parse(raw.trim()).ok()?;
    if !u.has_host() {
        return None;
    }
    u.set_fragment(None);
    Some(u.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid fixture index {path}: {source}")]
    Index { path: PathBuf, source: serde_json::Error },
    #[error("invalid fixture key '{0}' (expected \"METHOD absolute-url\")")]
    Key(String),
    #[error("fixture status {status} for '{key}' is outside 100..=599")]
    Status { key: String, status: u16 },
}

#[derive(Debug, Deserialize)]
struct IndexEntry {
    status: u16,
    #[serde(default)]
    headers: Vec<(String, String)>,
    #[serde(default)]
    body: Option<String>,
}

/// Recorded HTTP exchanges keyed by method and normalized URL.
///
/// Layout: `index.json` maps `"METHOD url"` to
/// `{"status": 200, "headers": [["name", "value"], ...], "body": "rel/path"}`.
/// Body files are read once, at open time.
#[derive(Debug, Clone)]
pub struct FixtureStore {
    root: PathBuf,
    entries: HashMap<(Method, String), HttpResponse>,
}

impl FixtureStore {
    pub fn open(root: impl AsRef<Path>) -> Result<Self, FixtureError> {
        let root = root.as_ref().to_path_buf();
        let index_path = root.join("index.json");
        let raw =
            fs::read_to_string(&index_path).map_err(|source| FixtureError::Io { path: index_path.clone(), source })?;
        let index: indexmap::IndexMap<String, IndexEntry> =
            serde_json::from_str(&raw).map_err(|source| FixtureError::Index { path: index_path.clone(), source })?;

        let mut entries = HashMap::new();
        for (key, entry) in index {
            let (method, url) = key.split_once(' ').ok_or_else(|| FixtureError::Key(key.clone()))?;
            let method: Method = method.parse().map_err(|_| FixtureError::Key(key.clone()))?;
            let url = normalize_url(url).ok_or_else(|| FixtureError::Key(key.clone()))?;
            if !(100..=599).contains(&entry.status) {
                return Err(FixtureError::Status { key, status: entry.status });
            }
            let body = match (&entry.body, method) {
                (_, Method::Head) | (None, _) => Vec::new(),
                (Some(rel), _) => {
                    let path = root.join(rel);
                    fs::read(&path).map_err(|source| FixtureError::Io { path, source })?
                }
            };
            let response = HttpResponse { url: url.clone(), status: entry.status, headers: entry.headers, body };
            entries.insert((method, url), response);
        }
        Ok(FixtureStore { root, entries })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, method: Method, url: &str) -> Option<&HttpResponse> {
        self.entries.get(&(method, normalize_url(url)?))
    }
}

/// Where fetches are answered from.
#[derive(Debug, Clone)]
pub enum FetchMode {
    Offline(Arc<FixtureStore>),
    /// Real network access; needs the `live` feature, otherwise every
    /// fetch fails.
    Live(LiveConfig),
}

#[derive(Debug, Clone)]
pub struct LiveConfig {
    /// Minimum delay between two requests.
    pub min_interval: std::time::Duration,
    pub timeout: std::time::Duration,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig { min_interval: std::time::Duration::from_millis(500), timeout: std::time::Duration::from_secs(20) }
    }
}

impl FetchMode {
    pub fn offline(store: FixtureStore) -> Self {
        FetchMode::Offline(Arc::new(store))
    }

    /// Mode with no fixtures at all: every fetch fails.
    pub fn empty() -> Self {
        FetchMode::Offline(Arc::new(FixtureStore { root: PathBuf::new(), entries: HashMap::new() }))
    }
}

/// Download what `input` designates.
///
/// Accepts Url, HttpRequest, or Text holding an absolute URL. Status ≥ 400,
/// a missing fixture or a transport failure give an empty list.
pub fn fetch(input: &Item, mode: &FetchMode, method_override: Option<Method>) -> Vec<Item> {
    let request = match &input.payload {
        Payload::Url(u) => HttpRequest::get(u.trim()),
        Payload::Text(t) if normalize_url(t).is_some() => HttpRequest::get(t.trim()),
        Payload::HttpRequest(r) => r.clone(),
        _ => return Vec::new(),
    };
    let method = method_override.unwrap_or(request.method);
    let response = match mode {
        FetchMode::Offline(store) => store.lookup(method, &request.url).cloned(),
        FetchMode::Live(cfg) => live::perform(method, &request, cfg),
    };
    match response {
        Some(mut r) if r.status < 400 => {
            if method == Method::Head {
                r.body.clear();
            }
            vec![Item::new(Payload::HttpResponse(r))]
        }
        _ => Vec::new(),
    }
}

/// A configured remote service.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub url: String,
    pub method: Method,
    /// Caller parameter name → wire name. Unmapped names pass through.
    pub mapping: Vec<(String, String)>,
}

impl Endpoint {
    pub fn new(url: impl Into<String>, method: Method) -> Self {
        Endpoint { url: url.into(), method, mapping: Vec::new() }
    }
}

/// Call `endpoint` with `params`: build the request, then fetch it.
pub fn query_service(params: &[(String, String)], endpoint: &Endpoint, mode: &FetchMode) -> Vec<Item> {
    let pairs: Vec<(String, String)> = params
        .iter()
        .map(|(k, v)| {
            let wire = endpoint.mapping.iter().find(|(from, _)| from == k).map(|(_, to)| to.clone());
            (wire.unwrap_or_else(|| k.clone()), v.clone())
        })
        .collect();
    build_http_query(endpoint.method, &endpoint.url, &pairs).iter().flat_map(|req| fetch(req, mode, None)).collect()
}

#[cfg(feature = "live")]
mod live {
    use std::sync::Mutex;
    use std::time::Instant;

    use super::LiveConfig;
    use crate::dataflow::{HttpRequest, HttpResponse, Method};

    static LAST: Mutex<Option<Instant>> = Mutex::new(None);

    pub(super) fn perform(method: Method, req: &HttpRequest, cfg: &LiveConfig) -> Option<HttpResponse> {
        {
            let mut last = LAST.lock().unwrap_or_else(|e| e.into_inner());
            if let Some(t) = *last {
                let elapsed = t.elapsed();
                if elapsed < cfg.min_interval {
                    std::thread::sleep(cfg.min_interval - elapsed);
                }
            }
            *last = Some(Instant::now());
        }
        let agent = ureq::AgentBuilder::new().timeout(cfg.timeout).build();
        let mut call = agent.request(method.as_str(), &req.url);
        for (k, v) in &req.headers {
            call = call.set(k, v);
        }
        let result = if req.body.is_empty() { call.call() } else { call.send_bytes(&req.body) };
        let resp = match result {
            Ok(r) | Err(ureq::Error::Status(_, r)) => r,
            Err(_) => return None,
        };
        let status = resp.status();
        let url = resp.get_url().to_string();
        let headers = resp
            .headers_names()
            .into_iter()
            .filter_map(|n| resp.header(&n).map(|v| (n.to_ascii_lowercase(), v.to_string())))
            .collect();
        let mut body = Vec::new();
        if method != Method::Head {
            std::io::Read::read_to_end(&mut resp.into_reader(), &mut body).ok()?;
        }
        Some(HttpResponse { url, status, headers, body })
    }
}

#[cfg(not(feature = "live"))]
mod live {
    use super::LiveConfig;
    use crate::dataflow::{HttpRequest, HttpResponse, Method};

    pub(super) fn perform(_: Method, _: &HttpRequest, _: &LiveConfig) -> Option<HttpResponse> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
        list.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    /// Independent application/x-www-form-urlencoded byte encoder.
    fn form_encode(s: &str) -> String {
        let mut out = String::new();
        for b in s.bytes() {
            match b {
                b' ' => out.push('+'),
                b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'*' | b'-' | b'.' | b'_' => out.push(b as char),
                _ => out.push_str(&format!("%{b:02X}")),
            }
        }
        out
    }

    fn request_of(items: &[Item]) -> &HttpRequest {
        match &items[0].payload {
            Payload::HttpRequest(r) => r,
            other => panic!("expected request, got {other:?}"),
        }
    }

    #[test]
    fn empty_pair_set_keeps_url() {
        let items = build_http_query(Method::Get, "http://dblp.uni-trier.de", &[]);
        assert_eq!(items.len(), 1);
        assert_eq!(request_of(&items).url, "http://dblp.uni-trier.de");
    }

    #[test]
    fn pairs_are_form_encoded_in_order() {
        let items = build_http_query(Method::Get, "http://s.example/search", &pairs(&[("q", "tina arch")]));
        assert_eq!(request_of(&items).url, format!("http://s.example/search?q={}", form_encode("tina arch")));
        assert_eq!(request_of(&items).url, "http://s.example/search?q=tina+arch");

        let p = pairs(&[("b", "x&y=z/é"), ("a", "1 2")]);
        let items = build_http_query(Method::Get, "http://s.example/s?k=v", &p);
        let expected = format!("http://s.example/s?k=v&b={}&a={}", form_encode("x&y=z/é"), form_encode("1 2"));
        assert_eq!(request_of(&items).url, expected);
    }

    #[test]
    fn head_and_post() {
        let items = build_http_query(Method::Head, "http://h.example/doc.pdf", &[]);
        assert_eq!(request_of(&items).method, Method::Head);

        let items = build_http_query(Method::Post, "http://h.example/f", &pairs(&[("q", "a b")]));
        let r = request_of(&items);
        assert_eq!(r.url, "http://h.example/f");
        assert_eq!(r.body, b"q=a+b");
        assert_eq!(r.headers[0].1, "application/x-www-form-urlencoded");
    }

    #[test]
    fn bad_base_urls() {
        assert!(build_http_query(Method::Get, "/relative", &[]).is_empty());
        assert!(build_http_query(Method::Get, "not a url", &[]).is_empty());
        assert!(build_http_query(Method::Get, "http://x.example/#frag", &[]).is_empty());
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_url("HTTP://Example.COM:80/a?b=1&a=2").unwrap(), "http://example.com/a?b=1&a=2");
        assert_eq!(normalize_url("https://example.com:443").unwrap(), "https://example.com/");
        assert_eq!(normalize_url("http://example.com:8080/x").unwrap(), "http://example.com:8080/x");
        assert!(normalize_url("x/y").is_none());
    }

    fn store() -> (tempfile::TempDir, FixtureStore) {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("page.html"), "<p>hi</p>").unwrap();
        fs::write(
            dir.path().join("index.json"),
            r#"{
  "GET http://a.example/": {"status": 200, "headers": [["content-type", "text/html"]], "body": "page.html"},
  "HEAD http://a.example/doc": {"status": 200, "headers": [["content-length", "10"]], "body": "page.html"},
  "GET http://a.example/gone": {"status": 404, "headers": []}
}"#,
        )
        .unwrap();
        let s = FixtureStore::open(dir.path()).unwrap();
        (dir, s)
    }

    #[test]
    fn offline_fetch() {
        let (_dir, s) = store();
        let mode = FetchMode::offline(s);
        let out = fetch(&Item::url("http://A.example"), &mode, None);
        match &out[0].payload {
            Payload::HttpResponse(r) => {
                assert_eq!(r.status, 200);
                assert_eq!(r.body, b"<p>hi</p>");
            }
            other => panic!("{other:?}"),
        }
        assert!(fetch(&Item::url("http://a.example/none"), &mode, None).is_empty());
        assert!(fetch(&Item::url("http://a.example/gone"), &mode, None).is_empty());

        let head = fetch(&Item::url("http://a.example/doc"), &mode, Some(Method::Head));
        match &head[0].payload {
            Payload::HttpResponse(r) => {
                assert!(r.body.is_empty());
                assert_eq!(r.header("Content-Length"), Some("10"));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(fetch(&Item::url("http://a.example/"), &mode, None), out);
    }

    #[test]
    fn query_service_composes_build_and_fetch() {
        let (_dir, s) = store();
        let mode = FetchMode::offline(s);
        let ep = Endpoint::new("http://a.example/", Method::Get);
        assert_eq!(query_service(&[], &ep, &mode).len(), 1);
        assert!(query_service(&pairs(&[("q", "x")]), &ep, &mode).is_empty());
    }
}
