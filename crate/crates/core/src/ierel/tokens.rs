use crate::markup::{self, MarkupEvent};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Open(String),
    Close(String),
    Word(String),
}

impl Token {
    pub fn is_tag(&self) -> bool {
        !matches!(self, Token::Word(_))
    }

    pub fn word(&self) -> Option<&str> {
        match self {
            Token::Word(w) => Some(w),
            _ => None,
        }
    }
}

const DROPPED: &[&str] = &["script", "style"];

/// Reduce markup to tag and word tokens.
///
/// Comments, script and style elements and attributes are dropped; tag names
/// are lowercased; self-closing tags yield only an Open token. Text splits
/// on whitespace, and every ASCII punctuation character is a word of its
/// own.
pub fn preprocess(document: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for event in markup::lex(document) {
        match event {
            MarkupEvent::Start { name, .. } | MarkupEvent::End { name } if DROPPED.contains(&name.as_str()) => {}
            MarkupEvent::Start { name, .. } => out.push(Token::Open(name)),
            MarkupEvent::End { name } => out.push(Token::Close(name)),
            MarkupEvent::Text(t) => out.extend(words(&t).into_iter().map(Token::Word)),
            MarkupEvent::RawText(_) => {}
        }
    }
    out
}

/// Word split of plain text under the tokenizer rules.
pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut cur = String::new();
        for c in chunk.chars() {
            if c.is_ascii_punctuation() {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            } else {
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

/// A value as extraction renders it: its words joined by single spaces.
pub fn normalize_value(value: &str) -> String {
    words(value).join(" ")
}
