//! Split generation and the line-delimited JSON split format.
//!
//! A split file starts with a header object and continues with one object
//! per example:
//!
//! ```text
//! {"format":"langgen-split","version":1,"language":"parity","role":"train","min_len":0,"max_len":40,"seed":7,"count":2}
//! {"text":"0110","label":0}
//! {"text":"1","label":1,"next":[["0","1"],["0","1","</s>"]]}
//! ```

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{NextSet, Word};
use crate::error::{Error, Result};
use crate::languages::{by_name, Language};
use crate::perturb::sample_negative;
use crate::rng::stream;

pub const FORMAT_NAME: &str = "langgen-split";
pub const FORMAT_VERSION: u32 = 1;

/// Role of a split within a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Train,
    ValShort,
    ValLong,
    TestShort,
    TestLong,
    EditdistProbe,
}

impl Role {
    pub const ALL: [Role; 6] = [
        Role::Train,
        Role::ValShort,
        Role::ValLong,
        Role::TestShort,
        Role::TestLong,
        Role::EditdistProbe,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Train => "train",
            Role::ValShort => "val-short",
            Role::ValLong => "val-long",
            Role::TestShort => "test-short",
            Role::TestLong => "test-long",
            Role::EditdistProbe => "editdist-probe",
        }
    }

    /// Tag mixed into the seed so every role has its own stream family.
    fn tag(&self) -> u64 {
        *self as u64 + 1
    }

    /// Roles whose texts test-short must avoid.
    fn dedup_against(&self) -> &'static [Role] {
        match self {
            Role::TestShort => &[Role::Train, Role::ValShort, Role::ValLong],
            _ => &[],
        }
    }

    fn negatives_only(&self) -> bool {
        matches!(self, Role::EditdistProbe)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown role {s:?}")))
    }
}

/// Size and length range of one split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub role: Role,
    pub count: usize,
    pub min_len: usize,
    pub max_len: usize,
}

/// The six standard splits.
pub fn standard_specs() -> Vec<SplitSpec> {
    let s = |role, count, min_len, max_len| SplitSpec {
        role,
        count,
        min_len,
        max_len,
    };
    vec![
        s(Role::Train, 10_000, 0, 40),
        s(Role::ValShort, 1_000, 0, 40),
        s(Role::ValLong, 1_000, 0, 80),
        s(Role::TestShort, 1_000, 0, 40),
        s(Role::TestLong, 5_010, 0, 500),
        s(Role::EditdistProbe, 50, 0, 500),
    ]
}

/// Suite shape plus generation knobs.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub specs: Vec<SplitSpec>,
    /// Attach next sets to positive examples.
    pub annotate: bool,
    /// Redraws per label before a deduplicated slot switches label or
    /// gives up.
    pub dedup_attempt_factor: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            specs: standard_specs(),
            annotate: false,
            dedup_attempt_factor: 100,
        }
    }
}

/// One labelled string.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub word: Word,
    pub label: bool,
    pub next: Option<Vec<NextSet>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub language: String,
    pub role: Role,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
    pub examples: Vec<LabeledExample>,
}

impl DatasetSplit {
    pub fn positive_fraction(&self) -> f64 {
        if self.examples.is_empty() {
            return 0.0;
        }
        self.examples.iter().filter(|e| e.label).count() as f64 / self.examples.len() as f64
    }

    pub fn file_name(&self) -> String {
        format!("{}.{}.jsonl", self.language, self.role)
    }
}

/// Fair-coin label, then a positive (with next sets if `annotate`) or a
/// negative example of that label.
pub fn generate_example(
    lang: &dyn Language,
    min: usize,
    max: usize,
    annotate: bool,
    rng: &mut dyn RngCore,
) -> Result<LabeledExample> {
    let label = rng.random_bool(0.5);
    labeled_example(lang, min, max, label, annotate, rng)
}

fn labeled_example(
    lang: &dyn Language,
    min: usize,
    max: usize,
    label: bool,
    annotate: bool,
    rng: &mut dyn RngCore,
) -> Result<LabeledExample> {
    if label {
        let word = lang.sample_positive(min, max, rng)?;
        let next = annotate.then(|| lang.next_sets(&word));
        Ok(LabeledExample { word, label, next })
    } else {
        Ok(LabeledExample {
            word: sample_negative(lang, min, max, rng)?,
            label,
            next: None,
        })
    }
}

/// Example `index` of a split, drawn from stream `(seed, role, index)`.
///
/// With `exclude`, an excluded text is redrawn with the same label from the
/// same stream, up to `attempts` times; only when that label is exhausted
/// does the slot switch to the other label.
fn slot(
    lang: &dyn Language,
    spec: &SplitSpec,
    seed: u64,
    index: usize,
    annotate: bool,
    exclude: Option<&HashSet<Word>>,
    attempts: usize,
) -> Result<Option<LabeledExample>> {
    let mut rng = stream(seed, spec.role.tag(), index as u64);
    let (min, max) = (spec.min_len, spec.max_len);
    let label = !spec.role.negatives_only() && rng.random_bool(0.5);
    let annotate = annotate && !spec.role.negatives_only();
    let Some(ex) = exclude else {
        return labeled_example(lang, min, max, label, annotate, &mut rng).map(Some);
    };
    for l in [label, !label] {
        for _ in 0..attempts.max(1) {
            let e = match labeled_example(lang, min, max, l, annotate, &mut rng) {
                Ok(e) => e,
                // The other label may still be feasible.
                Err(_) if l != label => return Ok(None),
                Err(e) => return Err(e),
            };
            if !ex.contains(&e.word) {
                return Ok(Some(e));
            }
        }
    }
    Ok(None)
}

/// Generates one split in parallel; example `i` depends only on
/// `(seed, role, i)`, so the result is independent of scheduling.
/// `exclude` lists texts the split must avoid.
pub fn generate_split(
    lang: &dyn Language,
    spec: &SplitSpec,
    seed: u64,
    annotate: bool,
    exclude: Option<&HashSet<Word>>,
    attempt_factor: usize,
) -> Result<DatasetSplit> {
    if spec.min_len > spec.max_len {
        return Err(Error::config(format!(
            "{}: empty length range [{}, {}]",
            spec.role, spec.min_len, spec.max_len
        )));
    }
    lang.prepare(spec.max_len)?;
    let slots = (0..spec.count)
        .into_par_iter()
        .map(|i| slot(lang, spec, seed, i, annotate, exclude, attempt_factor))
        .collect::<Result<Vec<_>>>()?;
    let found = slots.iter().filter(|s| s.is_some()).count();
    if found < spec.count {
        return Err(Error::DedupExhausted {
            role: spec.role.to_string(),
            found,
            wanted: spec.count,
            attempts: 2 * attempt_factor.max(1),
        });
    }
    let examples = slots.into_iter().flatten().collect();
    Ok(DatasetSplit {
        language: lang.name().to_string(),
        role: spec.role,
        min_len: spec.min_len,
        max_len: spec.max_len,
        seed,
        examples,
    })
}

/// Generates every split of `config`, deduplicating test-short against the
/// train and validation splits generated before it.
pub fn generate_suite(
    lang: &dyn Language,
    config: &SuiteConfig,
    seed: u64,
) -> Result<Vec<DatasetSplit>> {
    if let Some(max) = config.specs.iter().map(|s| s.max_len).max() {
        lang.prepare(max)?;
    }
    let mut out: Vec<DatasetSplit> = Vec::with_capacity(config.specs.len());
    for spec in &config.specs {
        let against = spec.role.dedup_against();
        let exclude = (!against.is_empty()).then(|| {
            out.iter()
                .filter(|s| against.contains(&s.role))
                .flat_map(|s| s.examples.iter().map(|e| e.word.clone()))
                .collect::<HashSet<Word>>()
        });
        out.push(generate_split(
            lang,
            spec,
            seed,
            config.annotate,
            exclude.as_ref(),
            config.dedup_attempt_factor,
        )?);
    }
    Ok(out)
}

/// The standard six-split suite.
pub fn generate_standard_suite(lang: &dyn Language, seed: u64) -> Result<Vec<DatasetSplit>> {
    generate_suite(lang, &SuiteConfig::default(), seed)
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    language: String,
    role: Role,
    min_len: usize,
    max_len: usize,
    seed: u64,
    count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    text: String,
    label: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    next: Option<Vec<Vec<String>>>,
}

/// Serializes a split; `lang` supplies the glyphs.
pub fn write_split_to(
    split: &DatasetSplit,
    lang: &dyn Language,
    out: &mut dyn Write,
) -> Result<()> {
    let header = Header {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION,
        language: split.language.clone(),
        role: split.role,
        min_len: split.min_len,
        max_len: split.max_len,
        seed: split.seed,
        count: split.examples.len(),
    };
    let a = lang.alphabet();
    writeln!(
        out,
        "{}",
        serde_json::to_string(&header).expect("header serializes")
    )?;
    for e in &split.examples {
        let r = Record {
            text: a.render(&e.word),
            label: u8::from(e.label),
            next: e
                .next
                .as_ref()
                .map(|ns| ns.iter().map(|n| a.render_next_set(*n)).collect()),
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&r).expect("record serializes")
        )?;
    }
    Ok(())
}

pub fn write_split(split: &DatasetSplit, lang: &dyn Language, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_split_to(split, lang, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Parses a split, looking its language up in the registry. Texts are
/// tokenized with that language's alphabet.
pub fn read_split_from(input: &mut dyn BufRead, path: &str) -> Result<DatasetSplit> {
    let err = |line: usize, msg: String| Error::Format {
        path: path.to_string(),
        line,
        msg,
    };
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| err(1, "empty file".into()))??;
    let header: Header =
        serde_json::from_str(&first).map_err(|e| err(1, format!("bad header: {e}")))?;
    if header.format != FORMAT_NAME || header.version != FORMAT_VERSION {
        return Err(err(
            1,
            format!("unsupported format {} v{}", header.format, header.version),
        ));
    }
    let lang = by_name(&header.language)?;
    let a = lang.alphabet();
    let mut examples = Vec::with_capacity(header.count);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        let r: Record = serde_json::from_str(&line).map_err(|e| err(lineno, e.to_string()))?;
        let word = a.parse(&r.text).map_err(|e| err(lineno, e.to_string()))?;
        let label = match r.label {
            0 => false,
            1 => true,
            v => return Err(err(lineno, format!("label must be 0 or 1, got {v}"))),
        };
        let next = match r.next {
            None => None,
            Some(sets) => Some(
                sets.iter()
                    .map(|s| a.parse_next_set(s))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| err(lineno, "unknown glyph in next sets".into()))?,
            ),
        };
        examples.push(LabeledExample { word, label, next });
    }
    if examples.len() != header.count {
        return Err(err(
            examples.len() + 1,
            format!(
                "header count {} but {} records",
                header.count,
                examples.len()
            ),
        ));
    }
    Ok(DatasetSplit {
        language: header.language,
        role: header.role,
        min_len: header.min_len,
        max_len: header.max_len,
        seed: header.seed,
        examples,
    })
}

pub fn read_split(path: &Path) -> Result<DatasetSplit> {
    let f = fs::File::open(path)?;
    read_split_from(&mut BufReader::new(f), &path.display().to_string())
}

/// A problem found by [`validate_split`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// 1-based line in the split file (the header is line 1).
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

/// Re-checks labels, lengths and next sets against the language.
pub fn validate_split(split: &DatasetSplit, lang: &dyn Language) -> Vec<Violation> {
    let mut v = Vec::new();
    for (i, e) in split.examples.iter().enumerate() {
        let line = i + 2;
        let n = e.word.len();
        if n < split.min_len || n > split.max_len {
            v.push(Violation {
                line,
                msg: format!("length {n} outside [{}, {}]", split.min_len, split.max_len),
            });
        }
        if lang.contains(&e.word) != e.label {
            v.push(Violation {
                line,
                msg: format!("label {} disagrees with membership", u8::from(e.label)),
            });
        }
        if let Some(next) = &e.next {
            if next != &lang.next_sets(&e.word) {
                v.push(Violation {
                    line,
                    msg: "next sets disagree with the language".into(),
                });
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SuiteConfig {
        SuiteConfig {
            specs: standard_specs()
                .into_iter()
                .map(|mut s| {
                    s.count = s.count.min(200);
                    s
                })
                .collect(),
            annotate: true,
            dedup_attempt_factor: 100,
        }
    }

    #[test]
    fn suite_shapes_and_dedup() {
        let lang = by_name("parity").unwrap();
        let suite = generate_suite(lang.as_ref(), &small_config(), 5).unwrap();
        assert_eq!(suite.len(), 6);
        let seen: HashSet<&Word> = suite
            .iter()
            .filter(|s| matches!(s.role, Role::Train | Role::ValShort | Role::ValLong))
            .flat_map(|s| s.examples.iter().map(|e| &e.word))
            .collect();
        let test_short = suite.iter().find(|s| s.role == Role::TestShort).unwrap();
        assert!(test_short.examples.iter().all(|e| !seen.contains(&e.word)));
        for s in &suite {
            assert!(validate_split(s, lang.as_ref()).is_empty());
        }
        let probe = suite.last().unwrap();
        assert_eq!(probe.examples.len(), 50);
        assert!(probe.examples.iter().all(|e| !e.label));
    }

    #[test]
    fn generation_is_deterministic() {
        let lang = by_name("majority").unwrap();
        let a = generate_suite(lang.as_ref(), &small_config(), 9).unwrap();
        let b = generate_suite(lang.as_ref(), &small_config(), 9).unwrap();
        assert_eq!(a, b);
        let c = generate_suite(lang.as_ref(), &small_config(), 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn roundtrip() {
        let lang = by_name("stack-manipulation").unwrap();
        let spec = SplitSpec {
            role: Role::ValShort,
            count: 100,
            min_len: 0,
            max_len: 40,
        };
        let split = generate_split(lang.as_ref(), &spec, 3, true, None, 1).unwrap();
        let mut buf = Vec::new();
        write_split_to(&split, lang.as_ref(), &mut buf).unwrap();
        let back = read_split_from(&mut buf.as_slice(), "mem").unwrap();
        assert_eq!(back, split);
    }

    #[test]
    fn format_errors() {
        let header = r#"{"format":"langgen-split","version":1,"language":"parity","role":"train","min_len":0,"max_len":40,"seed":1,"count":2}"#;
        let missing = format!("{header}\n{{\"text\":\"1\"}}\n");
        let e = read_split_from(&mut missing.as_bytes(), "f").unwrap_err();
        assert!(e.to_string().contains("label"), "{e}");
        assert!(e.to_string().contains("f:2"), "{e}");
        let short = format!("{header}\n{{\"text\":\"1\",\"label\":1}}\n");
        let e = read_split_from(&mut short.as_bytes(), "f").unwrap_err();
        assert!(e.to_string().contains("header count 2"), "{e}");
        let unknown = header.replace("parity", "klingon");
        let e = read_split_from(&mut unknown.as_bytes(), "f").unwrap_err();
        assert!(matches!(e, Error::UnknownLanguage(_)));
    }

    #[test]
    fn infeasible_positive_range_errors() {
        let lang = by_name("repeat-01").unwrap();
        let spec = SplitSpec {
            role: Role::Train,
            count: 20,
            min_len: 3,
            max_len: 3,
        };
        assert!(generate_split(lang.as_ref(), &spec, 1, false, None, 1).is_err());
    }
}
