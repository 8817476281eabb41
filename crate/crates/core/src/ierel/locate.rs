use super::pattern::{Pattern, PatternToken};
use super::tokens::{words, Token};
use super::ExampleInstance;

/// Token range `[start, end)` matched by field `field`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldMatch {
    pub field: usize,
    pub start: usize,
    pub end: usize,
}

/// One placement of an example: its non-empty fields, in field order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub matches: Vec<FieldMatch>,
}

impl Occurrence {
    pub fn start(&self) -> usize {
        self.matches[0].start
    }

    pub fn end(&self) -> usize {
        self.matches[self.matches.len() - 1].end
    }

    pub fn span(&self) -> usize {
        self.end() - self.start()
    }
}

fn matches_at(tokens: &[Token], at: usize, needle: &[String]) -> bool {
    at + needle.len() <= tokens.len()
        && needle.iter().enumerate().all(|(i, w)| tokens[at + i].word() == Some(w.as_str()))
}

fn find_from(tokens: &[Token], from: usize, needle: &[String]) -> Option<usize> {
    (from..tokens.len()).find(|&i| matches_at(tokens, i, needle))
}

/// Placements of `instance` in `tokens` covering at most `window` tokens.
///
/// Candidates start at each placement of the first non-empty field; every
/// later field takes its earliest placement after the previous one. The
/// result is the greedy non-overlapping selection by (span, start),
/// returned in start order.
pub fn locate_instance(tokens: &[Token], instance: &ExampleInstance, window: usize) -> Vec<Occurrence> {
    let fields: Vec<(usize, Vec<String>)> =
        instance.fields.iter().enumerate().map(|(i, (_, v))| (i, words(v))).filter(|(_, w)| !w.is_empty()).collect();
    let Some((first_idx, first)) = fields.first() else {
        return Vec::new();
    };

    let mut candidates = Vec::new();
    for start in 0..tokens.len() {
        if !matches_at(tokens, start, first) {
            continue;
        }
        let mut matches = vec![FieldMatch { field: *first_idx, start, end: start + first.len() }];
        let mut pos = start + first.len();
        let mut ok = true;
        for (idx, needle) in &fields[1..] {
            match find_from(tokens, pos, needle) {
                Some(at) if at + needle.len() - start <= window => {
                    matches.push(FieldMatch { field: *idx, start: at, end: at + needle.len() });
                    pos = at + needle.len();
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && pos - start <= window {
            candidates.push(Occurrence { matches });
        }
    }

    candidates.sort_by_key(|o| (o.span(), o.start()));
    let mut chosen: Vec<Occurrence> = Vec::new();
    for c in candidates {
        if chosen.iter().all(|o| c.end() <= o.start() || o.end() <= c.start()) {
            chosen.push(c);
        }
    }
    chosen.sort_by_key(Occurrence::start);
    chosen
}

/// Context pattern of one occurrence.
///
/// Up to `left` tokens before and `right` tokens after the occurrence are
/// kept, each side stopping after the nearest tag. Field matches become
/// slots whose bound is the observed length; tokens between fields are
/// copied.
pub fn extract_context(tokens: &[Token], occ: &Occurrence, left: usize, right: usize) -> Pattern {
    let mut out = Vec::new();

    let mut lo = occ.start();
    while lo > 0 && occ.start() - lo < left {
        lo -= 1;
        if tokens[lo].is_tag() {
            break;
        }
    }
    out.extend(tokens[lo..occ.start()].iter().map(PatternToken::from));

    let mut pos = occ.start();
    for m in &occ.matches {
        out.extend(tokens[pos..m.start].iter().map(PatternToken::from));
        out.push(PatternToken::Slot { field: m.field, max_len: m.end - m.start });
        pos = m.end;
    }

    let mut hi = occ.end();
    while hi < tokens.len() && hi - occ.end() < right {
        hi += 1;
        if tokens[hi - 1].is_tag() {
            break;
        }
    }
    out.extend(tokens[occ.end()..hi].iter().map(PatternToken::from));
    Pattern::new(out)
}

#[cfg(test)]
mod tests {
    use super::super::tokens::preprocess;
    use super::*;
    use PatternToken::*;

    fn conf(acr: &str, year: &str, city: &str, country: &str) -> ExampleInstance {
        ExampleInstance::new(&[("acronyme", acr), ("year", year), ("city", city), ("country", country)])
    }

    /// Every way to place the fields in order without overlap, by brute force.
    fn all_placements(tokens: &[Token], inst: &ExampleInstance) -> Vec<Vec<(usize, usize)>> {
        fn go(
            tokens: &[Token],
            fields: &[Vec<String>],
            from: usize,
            acc: &mut Vec<(usize, usize)>,
            out: &mut Vec<Vec<(usize, usize)>>,
        ) {
            let Some((f, rest)) = fields.split_first() else {
                out.push(acc.clone());
                return;
            };
            for s in from..tokens.len() {
                if s + f.len() <= tokens.len()
                    && f.iter().enumerate().all(|(i, w)| tokens[s + i] == Token::Word(w.clone()))
                {
                    acc.push((s, s + f.len()));
                    go(tokens, rest, s + f.len(), acc, out);
                    acc.pop();
                }
            }
        }
        let fields: Vec<Vec<String>> = inst.fields.iter().map(|(_, v)| words(v)).filter(|w| !w.is_empty()).collect();
        let mut out = Vec::new();
        go(tokens, &fields, 0, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn single_row() {
        let toks = preprocess("<li>VLDB 2001 : Roma , Italy</li>");
        let inst = conf("VLDB", "2001", "Roma", "Italy");
        let brute = all_placements(&toks, &inst);
        assert_eq!(brute.len(), 1);
        let occ = locate_instance(&toks, &inst, 200);
        assert_eq!(occ.len(), 1);
        let got: Vec<(usize, usize)> = occ[0].matches.iter().map(|m| (m.start, m.end)).collect();
        assert_eq!(got, brute[0]);
        assert_eq!((occ[0].start(), occ[0].end()), (1, 7));
    }

    #[test]
    fn absent_value() {
        let toks = preprocess("<li>VLDB 2001 : Roma , Italy</li>");
        assert!(locate_instance(&toks, &conf("VLDB", "2001", "Paris", "Italy"), 200).is_empty());
    }

    #[test]
    fn minimal_span_wins() {
        let toks = preprocess("<p>VLDB</p> <p>x y z</p> <li>VLDB 2001 : Roma , Italy</li>");
        let inst = conf("VLDB", "2001", "Roma", "Italy");
        let brute = all_placements(&toks, &inst);
        assert_eq!(brute.len(), 2);
        let best = brute.iter().min_by_key(|p| (p.last().unwrap().1 - p[0].0, p[0].0)).unwrap();
        let occ = locate_instance(&toks, &inst, 200);
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].start(), best[0].0);
        assert_eq!(occ[0].span(), best.last().unwrap().1 - best[0].0);
    }

    #[test]
    fn window_limits_span() {
        let toks = preprocess("<li>VLDB 2001 : Roma , Italy</li>");
        assert!(locate_instance(&toks, &conf("VLDB", "2001", "Roma", "Italy"), 5).is_empty());
        assert_eq!(locate_instance(&toks, &conf("VLDB", "2001", "Roma", "Italy"), 6).len(), 1);
    }

    #[test]
    fn context_of_list_row() {
        let toks = preprocess("<li>VLDB 2001 : Roma , Italy</li>");
        let occ = &locate_instance(&toks, &conf("VLDB", "2001", "Roma", "Italy"), 200)[0];
        let p = extract_context(&toks, occ, 1, 1);
        assert_eq!(
            p.tokens,
            vec![
                Open("li".into()),
                Slot { field: 0, max_len: 1 },
                Slot { field: 1, max_len: 1 },
                Word(":".into()),
                Slot { field: 2, max_len: 1 },
                Word(",".into()),
                Slot { field: 3, max_len: 1 },
                Close("li".into()),
            ]
        );
        let bare = extract_context(&toks, occ, 0, 0);
        assert_eq!(bare.tokens.first(), Some(&Slot { field: 0, max_len: 1 }));
        assert_eq!(bare.tokens.last(), Some(&Slot { field: 3, max_len: 1 }));
    }

    #[test]
    fn context_clamps_and_stops_at_tag() {
        let toks = preprocess("VLDB 2001 : Roma , Italy and more words here <hr> tail");
        let occ = &locate_instance(&toks, &conf("VLDB", "2001", "Roma", "Italy"), 200)[0];
        let p = extract_context(&toks, occ, 5, 3);
        assert_eq!(p.tokens[0], Slot { field: 0, max_len: 1 });
        assert_eq!(p.tokens.len(), 6 + 3);

        let toks = preprocess("a b <i>c</i> d VLDB 2001 : Roma , Italy");
        let occ = &locate_instance(&toks, &conf("VLDB", "2001", "Roma", "Italy"), 200)[0];
        let p = extract_context(&toks, occ, 6, 6);
        assert_eq!(p.tokens[0], Close("i".into()));
        assert_eq!(p.tokens[1], Word("d".into()));
    }

    #[test]
    fn empty_fields_get_no_slot() {
        let toks = preprocess("<li>VLDB 2001 : Roma , Italy</li>");
        let inst = ExampleInstance::new(&[("acronyme", "VLDB"), ("province", ""), ("country", "Italy")]);
        let occ = locate_instance(&toks, &inst, 200);
        assert_eq!(occ[0].matches.iter().map(|m| m.field).collect::<Vec<_>>(), vec![0, 2]);
    }
}
