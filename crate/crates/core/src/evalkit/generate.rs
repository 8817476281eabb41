use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalkitError;
use crate::dataflow::{Item, Record};
use crate::ierel::{preprocess, words};
use crate::operators::{Segment, Template};

/// How values of one field are drawn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldGen {
    /// One capitalized pronounceable word.
    Word,
    /// Between `min` and `max` words.
    Words { min: usize, max: usize },
    /// Upper-case letters, `min` to `max` of them.
    Acronym { min: usize, max: usize },
    /// Integer in `min..=max`.
    Number { min: u32, max: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub name: String,
    pub gen: FieldGen,
}

/// One row layout. `row` holds `$field` placeholders; `before` and `after`
/// surround each block of rows on a page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowFormat {
    pub label: String,
    #[serde(default)]
    pub before: String,
    pub row: String,
    #[serde(default)]
    pub after: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSourceSpec {
    pub name: String,
    pub fields: Vec<FieldSpec>,
    pub formats: Vec<RowFormat>,
    /// Documents the rows are spread over; each page holds a contiguous
    /// share of every format's rows.
    pub pages: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRow {
    pub format: String,
    pub record: Record,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticSource {
    pub documents: Vec<String>,
    /// In generation order: formats in order, rows in order.
    pub truth: Vec<TruthRow>,
}

impl SyntheticSource {
    pub fn records(&self) -> Vec<Record> {
        self.truth.iter().map(|t| t.record.clone()).collect()
    }

    /// Truth rows of one format.
    pub fn rows_of<'a>(&'a self, format: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.truth.iter().filter(move |t| t.format == format).map(|t| &t.record)
    }
}

const ONSETS: &[&str] = &["b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "st"];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ia", "ou"];

fn word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.gen_range(2..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS[rng.gen_range(0..ONSETS.len())]);
        w.push_str(VOWELS[rng.gen_range(0..VOWELS.len())]);
    }
    let mut chars = w.chars();
    chars.next().map(|c| c.to_ascii_uppercase().to_string() + chars.as_str()).unwrap_or_default()
}

impl FieldGen {
    fn draw(&self, rng: &mut ChaCha8Rng) -> String {
        match *self {
            FieldGen::Word => word(rng),
            FieldGen::Words { min, max } => {
                let n = rng.gen_range(min.max(1)..=max.max(min).max(1));
                (0..n).map(|_| word(rng)).collect::<Vec<_>>().join(" ")
            }
            FieldGen::Acronym { min, max } => {
                let n = rng.gen_range(min.max(1)..=max.max(min).max(1));
                (0..n).map(|_| char::from(b'A' + rng.gen_range(0..26u8))).collect()
            }
            FieldGen::Number { min, max } => rng.gen_range(min..=max.max(min)).to_string(),
        }
    }
}

const MAX_DRAWS: usize = 1000;

/// Build documents embedding freshly drawn rows, and the rows themselves.
///
/// Identical specs give byte-identical output. Every record is distinct,
/// and no value contains a word that a row template uses literally.
pub fn generate_source(spec: &SyntheticSourceSpec) -> Result<SyntheticSource, EvalkitError> {
    if spec.formats.is_empty() || spec.formats.iter().all(|f| f.rows == 0) {
        return Err(EvalkitError::EmptySpec);
    }
    let mut templates = Vec::new();
    let mut literal_words = HashSet::new();
    for f in &spec.formats {
        let t: Template =
            f.row.parse().map_err(|e| EvalkitError::BadTemplate { format: f.label.clone(), message: e })?;
        let used: Vec<&str> = t.fields().collect();
        if let Some(missing) = spec.fields.iter().find(|d| !used.contains(&d.name.as_str())) {
            return Err(EvalkitError::MissingPlaceholder { format: f.label.clone(), field: missing.name.clone() });
        }
        if let Some(extra) = used.iter().find(|u| !spec.fields.iter().any(|d| d.name == **u)) {
            return Err(EvalkitError::BadTemplate {
                format: f.label.clone(),
                message: format!("'${extra}' is not a declared field"),
            });
        }
        for seg in &t.segments {
            if let Segment::Literal(l) = seg {
                literal_words.extend(preprocess(l).into_iter().filter_map(|t| t.word().map(str::to_string)));
            }
        }
        templates.push(t);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seen = HashSet::new();
    let mut truth = Vec::new();
    let mut rendered: Vec<Vec<String>> = Vec::new();
    for (f, t) in spec.formats.iter().zip(&templates) {
        let mut lines = Vec::new();
        for _ in 0..f.rows {
            let record = (0..MAX_DRAWS)
                .map(|_| spec.fields.iter().map(|d| (d.name.clone(), d.gen.draw(&mut rng))).collect::<Record>())
                .find(|r| {
                    r.values().all(|v| words(v).iter().all(|w| !literal_words.contains(w)))
                        && seen.insert(serde_json::to_string(r).expect("string map serializes"))
                })
                .ok_or(EvalkitError::Exhausted)?;
            let item = Item::record(record.clone());
            let (line, _) = t.render(&item, crate::xml::escape_text, false).expect("fields checked above");
            lines.push(line);
            truth.push(TruthRow { format: f.label.clone(), record });
        }
        rendered.push(lines);
    }

    let pages = spec.pages.max(1);
    let documents = (0..pages)
        .map(|k| {
            let mut doc = format!("<html><head><title>{0}</title></head><body>\n<h1>{0}</h1>\n", spec.name);
            for (f, lines) in spec.formats.iter().zip(&rendered) {
                let share: Vec<&String> =
                    lines.iter().enumerate().filter(|(i, _)| i * pages / lines.len() == k).map(|(_, l)| l).collect();
                if share.is_empty() {
                    continue;
                }
                doc.push_str(&f.before);
                doc.push('\n');
                for l in share {
                    doc.push_str(l);
                    doc.push('\n');
                }
                doc.push_str(&f.after);
                doc.push('\n');
            }
            doc.push_str("</body></html>\n");
            doc
        })
        .collect();
    Ok(SyntheticSource { documents, truth })
}
