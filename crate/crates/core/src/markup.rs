//! Permissive tag-soup lexer.
//!
//! Never fails: anything that does not look like markup is text. Tag and
//! attribute names are lowercased, entities are decoded, comments,
//! declarations and processing instructions are dropped. The bodies of
//! `script` and `style` are returned undecoded as [`MarkupEvent::RawText`].

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkupEvent {
    Start { name: String, attributes: Vec<(String, String)>, self_closing: bool },
    End { name: String },
    Text(String),
    RawText(String),
}

const RAW_TEXT_ELEMENTS: &[&str] = &["script", "style"];

pub fn lex(input: &str) -> Vec<MarkupEvent> {
    let mut lexer = Lexer { src: input, pos: 0, events: Vec::new(), text: String::new() };
    lexer.run();
    lexer.events
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    events: Vec<MarkupEvent>,
    text: String,
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn flush_text(&mut self) {
        if !self.text.is_empty() {
            let raw = std::mem::take(&mut self.text);
            self.events.push(MarkupEvent::Text(decode_entities(&raw)));
        }
    }

    fn run(&mut self) {
        while self.pos < self.src.len() {
            let rest = self.rest();
            match rest.find('<') {
                None => {
                    self.text.push_str(rest);
                    self.pos = self.src.len();
                }
                Some(i) => {
                    self.text.push_str(&rest[..i]);
                    self.pos += i;
                    self.markup();
                }
            }
        }
        self.flush_text();
    }

    fn markup(&mut self) {
        let rest = self.rest();
        if let Some(body) = rest.strip_prefix("<!--") {
            self.flush_text();
            self.pos += 4 + body.find("-->").map_or(body.len(), |i| i + 3);
        } else if rest.starts_with("<!") || rest.starts_with("<?") {
            self.flush_text();
            self.pos += rest.find('>').map_or(rest.len(), |i| i + 1);
        } else if let Some(after) = rest.strip_prefix("</") {
            if after.starts_with(|c: char| c.is_ascii_alphabetic()) {
                self.flush_text();
                let end = after.find('>').map_or(after.len(), |i| i + 1);
                let name = tag_name(&after[..end]);
                self.pos += 2 + end;
                self.events.push(MarkupEvent::End { name });
            } else {
                self.text.push_str("</");
                self.pos += 2;
            }
        } else if rest[1..].starts_with(|c: char| c.is_ascii_alphabetic()) {
            self.flush_text();
            self.start_tag();
        } else {
            self.text.push('<');
            self.pos += 1;
        }
    }

    fn start_tag(&mut self) {
        let src = self.rest();
        let bytes = src.as_bytes();
        let mut i = 1;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>' && bytes[i] != b'/' {
            i += 1;
        }
        let name = src[1..i].to_ascii_lowercase();
        let mut attributes = Vec::new();
        let mut self_closing = false;
        loop {
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i >= bytes.len() {
                break;
            }
            match bytes[i] {
                b'>' => {
                    i += 1;
                    break;
                }
                b'/' => {
                    i += 1;
                    if bytes.get(i) == Some(&b'>') {
                        self_closing = true;
                        i += 1;
                        break;
                    }
                }
                _ => {
                    let start = i;
                    while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'=' | b'>' | b'/')
                    {
                        i += 1;
                    }
                    let key = src[start..i].to_ascii_lowercase();
                    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                        i += 1;
                    }
                    let mut value = String::new();
                    if bytes.get(i) == Some(&b'=') {
                        i += 1;
                        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                            i += 1;
                        }
                        match bytes.get(i) {
                            Some(&q) if q == b'"' || q == b'\'' => {
                                let vstart = i + 1;
                                let vend = src[vstart..].find(q as char).map_or(src.len(), |j| vstart + j);
                                value = decode_entities(&src[vstart..vend]);
                                i = (vend + 1).min(src.len());
                            }
                            _ => {
                                let vstart = i;
                                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>' {
                                    i += 1;
                                }
                                value = decode_entities(&src[vstart..i]);
                            }
                        }
                    }
                    if !key.is_empty() && !attributes.iter().any(|(k, _)| *k == key) {
                        attributes.push((key, value));
                    }
                }
            }
        }
        self.pos += i;
        let raw = RAW_TEXT_ELEMENTS.contains(&name.as_str()) && !self_closing;
        self.events.push(MarkupEvent::Start { name: name.clone(), attributes, self_closing });
        if raw {
            self.raw_text(&name);
        }
    }

    fn raw_text(&mut self, name: &str) {
        let rest = self.rest();
        let close = format!("</{name}");
        let lower = rest.to_ascii_lowercase();
        let end = lower.find(&close).unwrap_or(rest.len());
        if end > 0 {
            self.events.push(MarkupEvent::RawText(rest[..end].to_string()));
        }
        self.pos += end;
        if self.pos < self.src.len() {
            let tail = self.rest();
            self.pos += tail.find('>').map_or(tail.len(), |i| i + 1);
            self.events.push(MarkupEvent::End { name: name.to_string() });
        }
    }
}

fn tag_name(s: &str) -> String {
    s.split(|c: char| c.is_ascii_whitespace() || c == '>' || c == '/').next().unwrap_or("").to_ascii_lowercase()
}

const NAMED_ENTITIES: &[(&str, char)] = &[
    ("amp", '&'),
    ("lt", '<'),
    ("gt", '>'),
    ("quot", '"'),
    ("apos", '\''),
    ("nbsp", '\u{a0}'),
    ("copy", '©'),
    ("reg", '®'),
    ("eacute", 'é'),
    ("egrave", 'è'),
    ("agrave", 'à'),
    ("ccedil", 'ç'),
    ("ouml", 'ö'),
    ("uuml", 'ü'),
    ("auml", 'ä'),
    ("szlig", 'ß'),
    ("middot", '·'),
    ("ndash", '–'),
    ("mdash", '—'),
    ("hellip", '…'),
];

/// Decode character references. Unknown or malformed references are kept
/// verbatim.
pub fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let semi = rest[1..].find(';').map(|j| j + 1).filter(|&j| j <= 12);
        let decoded = semi.and_then(|j| {
            let body = &rest[1..j];
            let c = if let Some(num) = body.strip_prefix('#') {
                let code = match num.strip_prefix(['x', 'X']) {
                    Some(hex) => u32::from_str_radix(hex, 16).ok(),
                    None => num.parse::<u32>().ok(),
                };
                code.and_then(char::from_u32)
            } else {
                NAMED_ENTITIES.iter().find(|(n, _)| *n == body).map(|&(_, c)| c)
            };
            c.map(|c| (c, j + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}
