use std::fmt;

use serde_json::{json, Value};

use super::Token;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternToken {
    Open(String),
    Close(String),
    Word(String),
    /// Capture of field `field`, 1..=`max_len` words.
    Slot {
        field: usize,
        max_len: usize,
    },
    /// Any `min..=max` words.
    Gap {
        min: usize,
        max: usize,
    },
}

impl PatternToken {
    /// Tags and slots delimit the segments generalization works on.
    pub fn is_anchor(&self) -> bool {
        matches!(self, PatternToken::Open(_) | PatternToken::Close(_) | PatternToken::Slot { .. })
    }

    pub fn is_tag(&self) -> bool {
        matches!(self, PatternToken::Open(_) | PatternToken::Close(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            PatternToken::Open(n) => json!(["open", n]),
            PatternToken::Close(n) => json!(["close", n]),
            PatternToken::Word(w) => json!(["word", w]),
            PatternToken::Slot { field, max_len } => json!(["slot", field, max_len]),
            PatternToken::Gap { min, max } => json!(["gap", min, max]),
        }
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let arr = v.as_array()?;
        let tag = arr.first()?.as_str()?;
        let s = |i: usize| arr.get(i).and_then(Value::as_str).map(str::to_string);
        let n = |i: usize| arr.get(i).and_then(Value::as_u64).map(|x| x as usize);
        let tok = match (tag, arr.len()) {
            ("open", 2) => PatternToken::Open(s(1)?),
            ("close", 2) => PatternToken::Close(s(1)?),
            ("word", 2) => PatternToken::Word(s(1)?),
            ("slot", 3) => PatternToken::Slot { field: n(1)?, max_len: n(2)? },
            ("gap", 3) => PatternToken::Gap { min: n(1)?, max: n(2)? },
            _ => return None,
        };
        Some(tok)
    }
}

impl From<&Token> for PatternToken {
    fn from(t: &Token) -> Self {
        match t {
            Token::Open(n) => PatternToken::Open(n.clone()),
            Token::Close(n) => PatternToken::Close(n.clone()),
            Token::Word(w) => PatternToken::Word(w.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub tokens: Vec<PatternToken>,
}

impl Pattern {
    pub fn new(tokens: Vec<PatternToken>) -> Self {
        Pattern { tokens }
    }

    /// Compact JSON array form; also the canonical sort key.
    pub fn canonical(&self) -> String {
        Value::Array(self.tokens.iter().map(PatternToken::to_json).collect()).to_string()
    }

    pub fn tag_skeleton(&self) -> Vec<&PatternToken> {
        self.tokens.iter().filter(|t| t.is_tag()).collect()
    }

    pub fn literal_words(&self) -> Vec<&str> {
        self.tokens
            .iter()
            .filter_map(|t| match t {
                PatternToken::Word(w) => Some(w.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Anchors, and the word/gap runs around them (`anchors.len() + 1` runs).
    fn split(&self) -> (Vec<&PatternToken>, Vec<Vec<&PatternToken>>) {
        let mut anchors = Vec::new();
        let mut runs = vec![Vec::new()];
        for t in &self.tokens {
            if t.is_anchor() {
                anchors.push(t);
                runs.push(Vec::new());
            } else {
                runs.last_mut().expect("non-empty").push(t);
            }
        }
        (anchors, runs)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match t {
                PatternToken::Open(n) => write!(f, "<{n}>")?,
                PatternToken::Close(n) => write!(f, "</{n}>")?,
                PatternToken::Word(w) => f.write_str(w)?,
                PatternToken::Slot { field, max_len } => write!(f, "${field}[1..{max_len}]")?,
                PatternToken::Gap { min, max } => write!(f, "_[{min}..{max}]")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// Tag subsequences differ.
    SkeletonMismatch,
    /// Tags agree but slots differ in field or position.
    SlotMismatch,
    /// A merged gap would exceed the gap bound.
    GapBoundExceeded,
}

fn run_range(run: &[&PatternToken]) -> (usize, usize) {
    run.iter().fold((0, 0), |(lo, hi), t| match t {
        PatternToken::Gap { min, max } => (lo + min, hi + max),
        _ => (lo + 1, hi + 1),
    })
}

/// Merge two patterns with identical anchor skeletons.
///
/// Identical word runs are kept; differing runs become one gap spanning both
/// length ranges. Slot bounds take the larger of the two.
pub fn generalize_pair(p: &Pattern, q: &Pattern, gap_bound: usize) -> Result<Pattern, Failure> {
    if p.tag_skeleton() != q.tag_skeleton() {
        return Err(Failure::SkeletonMismatch);
    }
    let (pa, pr) = p.split();
    let (qa, qr) = q.split();
    let same_anchor = |a: &PatternToken, b: &PatternToken| match (a, b) {
        (PatternToken::Slot { field: f, .. }, PatternToken::Slot { field: g, .. }) => f == g,
        _ => a == b,
    };
    if pa.len() != qa.len() || !pa.iter().zip(&qa).all(|(a, b)| same_anchor(a, b)) {
        return Err(Failure::SlotMismatch);
    }

    let mut tokens = Vec::with_capacity(p.tokens.len());
    for i in 0..pr.len() {
        if pr[i] == qr[i] {
            tokens.extend(pr[i].iter().map(|t| (*t).clone()));
        } else {
            let (plo, phi) = run_range(&pr[i]);
            let (qlo, qhi) = run_range(&qr[i]);
            let (min, max) = (plo.min(qlo), phi.max(qhi));
            if max > gap_bound {
                return Err(Failure::GapBoundExceeded);
            }
            tokens.push(PatternToken::Gap { min, max });
        }
        if let (Some(a), Some(b)) = (pa.get(i), qa.get(i)) {
            tokens.push(match (a, b) {
                (PatternToken::Slot { field, max_len: m }, PatternToken::Slot { max_len: n, .. }) => {
                    PatternToken::Slot { field: *field, max_len: *m.max(n) }
                }
                _ => (*a).clone(),
            });
        }
    }
    Ok(Pattern::new(tokens))
}
