use std::collections::HashSet;

use super::pattern::{Pattern, PatternToken};
use super::tokens::Token;

/// A match of a pattern: token range and one `(field, start, end)` per slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub start: usize,
    pub end: usize,
    pub slots: Vec<(usize, usize, usize)>,
}

struct Search<'a> {
    pattern: &'a [PatternToken],
    tokens: &'a [Token],
    literals: HashSet<&'a str>,
    failed: HashSet<(usize, usize)>,
    slots: Vec<(usize, usize, usize)>,
}

impl Search<'_> {
    /// Depth-first, shortest extension first. Failure is a function of
    /// `(pi, ti)` alone, so failed states are memoized.
    fn run(&mut self, pi: usize, ti: usize) -> Option<usize> {
        if pi == self.pattern.len() {
            return Some(ti);
        }
        if self.failed.contains(&(pi, ti)) {
            return None;
        }
        let found = match &self.pattern[pi] {
            PatternToken::Open(n) => match self.tokens.get(ti) {
                Some(Token::Open(m)) if m == n => self.run(pi + 1, ti + 1),
                _ => None,
            },
            PatternToken::Close(n) => match self.tokens.get(ti) {
                Some(Token::Close(m)) if m == n => self.run(pi + 1, ti + 1),
                _ => None,
            },
            PatternToken::Word(w) => match self.tokens.get(ti) {
                Some(Token::Word(v)) if v == w => self.run(pi + 1, ti + 1),
                _ => None,
            },
            &PatternToken::Gap { min, max } => {
                let mut found = None;
                for n in min..=max {
                    if n > 0 && self.tokens.get(ti + n - 1).and_then(Token::word).is_none() {
                        break;
                    }
                    if let Some(end) = self.run(pi + 1, ti + n) {
                        found = Some(end);
                        break;
                    }
                }
                found
            }
            &PatternToken::Slot { field, max_len } => {
                let mut found = None;
                for n in 1..=max_len {
                    match self.tokens.get(ti + n - 1).and_then(Token::word) {
                        Some(w) if !self.literals.contains(w) => {}
                        _ => break,
                    }
                    self.slots.push((field, ti, ti + n));
                    if let Some(end) = self.run(pi + 1, ti + n) {
                        found = Some(end);
                        break;
                    }
                    self.slots.pop();
                }
                found
            }
        };
        if found.is_none() {
            self.failed.insert((pi, ti));
        }
        found
    }
}

/// Match `pattern` starting exactly at token `start`.
///
/// Gaps consume words only. A slot consumes one or more words, none equal
/// to a literal word of the pattern. The first match in shortest-first
/// depth-first order is returned.
pub fn match_at(pattern: &Pattern, tokens: &[Token], start: usize) -> Option<Match> {
    let mut search = Search {
        pattern: &pattern.tokens,
        tokens,
        literals: pattern.literal_words().into_iter().collect(),
        failed: HashSet::new(),
        slots: Vec::new(),
    };
    let end = search.run(0, start)?;
    Some(Match { start, end, slots: search.slots })
}
