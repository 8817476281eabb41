use proptest::prelude::*;
use wexfab::dataflow::Record;
use wexfab::evalkit::{
    extract_all, generate_source, FieldGen, FieldSpec, RowFormat, SyntheticSource, SyntheticSourceSpec,
};
use wexfab::ierel::{
    context_patterns, fixpoint, generalize_pair, learn_wrapper, preprocess, ExampleInstance, LearnConfig, Pattern,
    PatternToken,
};

fn anchor() -> impl Strategy<Value = PatternToken> {
    prop_oneof![
        prop::sample::select(vec!["a", "b"]).prop_map(|t| PatternToken::Open(t.into())),
        prop::sample::select(vec!["a", "b"]).prop_map(|t| PatternToken::Close(t.into())),
        (0usize..2, 1usize..4).prop_map(|(field, max_len)| PatternToken::Slot { field, max_len }),
    ]
}

fn run() -> impl Strategy<Value = Vec<PatternToken>> {
    let token = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(|w| PatternToken::Word(w.into())),
        (0usize..3, 0usize..3).prop_map(|(min, extra)| PatternToken::Gap { min, max: min + extra.max(1) }),
    ];
    prop::collection::vec(token, 0..3)
}

fn pattern() -> impl Strategy<Value = Pattern> {
    (run(), prop::collection::vec((anchor(), run()), 0..4)).prop_map(|(head, rest)| {
        let mut tokens = head;
        for (a, r) in rest {
            tokens.push(a);
            tokens.extend(r);
        }
        Pattern::new(tokens)
    })
}

fn fields() -> Vec<FieldSpec> {
    vec![
        FieldSpec { name: "code".into(), gen: FieldGen::Acronym { min: 2, max: 5 } },
        FieldSpec { name: "year".into(), gen: FieldGen::Number { min: 1970, max: 2009 } },
        FieldSpec { name: "place".into(), gen: FieldGen::Words { min: 1, max: 3 } },
    ]
}

fn formats() -> Vec<RowFormat> {
    vec![
        RowFormat {
            label: "list".into(),
            before: "<ul>".into(),
            row: "<li><b>$code</b> $year : $place</li>".into(),
            after: "</ul>".into(),
            rows: 0,
        },
        RowFormat {
            label: "table".into(),
            before: "<table>".into(),
            row: "<tr><td>$code</td><td>$year</td><td>$place</td></tr>".into(),
            after: "</table>".into(),
            rows: 0,
        },
        RowFormat {
            label: "para".into(),
            before: String::new(),
            row: "<p>$code ( $year ) at $place</p>".into(),
            after: String::new(),
            rows: 0,
        },
    ]
}

/// Seeded source with one to three layouts, and example picks into its
/// truth rows.
fn source() -> impl Strategy<Value = (SyntheticSource, Vec<usize>)> {
    (
        any::<u64>(),
        prop::collection::vec(0usize..12, 3),
        1usize..3,
        prop::collection::vec(any::<prop::sample::Index>(), 1..5),
    )
        .prop_map(|(seed, rows, pages, picks)| {
            let mut formats = formats();
            for (f, n) in formats.iter_mut().zip(rows) {
                f.rows = n;
            }
            formats.retain(|f| f.rows > 0);
            if formats.is_empty() {
                let mut f = self::formats().remove(0);
                f.rows = 3;
                formats.push(f);
            }
            let spec = SyntheticSourceSpec { name: "Prop".into(), fields: fields(), formats, pages, seed };
            let src = generate_source(&spec).expect("spec is well formed");
            let n = src.truth.len();
            (src, picks.iter().map(|p| p.index(n)).collect())
        })
}

fn example(r: &Record) -> ExampleInstance {
    ExampleInstance { fields: r.iter().map(|(k, v)| (k.clone(), v.clone())).collect() }
}

proptest! {
    #[test]
    fn merging_keeps_the_tag_skeleton(p in pattern(), q in pattern()) {
        if let Ok(g) = generalize_pair(&p, &q, 8) {
            prop_assert_eq!(g.tag_skeleton(), p.tag_skeleton());
            prop_assert_eq!(g.tag_skeleton(), q.tag_skeleton());
        } else if p.tag_skeleton() != q.tag_skeleton() {
            prop_assert!(generalize_pair(&q, &p, 8).is_err());
        }
    }

    #[test]
    fn merging_a_pattern_with_itself_is_identity(p in pattern()) {
        prop_assert_eq!(generalize_pair(&p, &p, 64), Ok(p));
    }

    #[test]
    fn wrapper_ignores_example_order_and_repeats((src, picks) in source(), shuffle in any::<u64>()) {
        let examples: Vec<ExampleInstance> = picks.iter().map(|&i| example(&src.truth[i].record)).collect();
        let mut permuted = examples.clone();
        let k = (shuffle as usize) % permuted.len();
        permuted.rotate_left(k);
        permuted.reverse();
        permuted.push(examples[k].clone());
        let cfg = LearnConfig::default();
        let (a, _) = learn_wrapper(&src.documents, &examples, &cfg).unwrap();
        let (b, _) = learn_wrapper(&src.documents, &permuted, &cfg).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn learning_is_incremental((src, picks) in source()) {
        let examples: Vec<ExampleInstance> = picks.iter().map(|&i| example(&src.truth[i].record)).collect();
        let cfg = LearnConfig::default();
        let (all, _) = learn_wrapper(&src.documents, &examples, &cfg).unwrap();
        let (last, rest) = examples.split_last().unwrap();
        let mut state = match learn_wrapper(&src.documents, rest, &cfg) {
            Ok((w, _)) => w.patterns,
            Err(_) => Vec::new(),
        };
        let tokenized: Vec<_> = src.documents.iter().map(|d| preprocess(d)).collect();
        state.extend(context_patterns(&tokenized, last, &cfg));
        prop_assert_eq!(fixpoint(state, cfg.gap_bound), all.patterns);
    }

    #[test]
    fn no_invented_instances((src, picks) in source()) {
        let examples: Vec<ExampleInstance> = picks.iter().map(|&i| example(&src.truth[i].record)).collect();
        let (w, _) = learn_wrapper(&src.documents, &examples, &LearnConfig::default()).unwrap();
        let truth = src.records();
        let extracted = extract_all(&w, &src.documents).unwrap();
        prop_assert!(!extracted.is_empty());
        for r in &extracted {
            prop_assert!(truth.contains(r), "invented {r:?}");
        }
        for e in &examples {
            let want: Record = e.fields.iter().cloned().collect();
            prop_assert!(extracted.contains(&want), "training example {want:?} missed");
        }
    }
}
