//! Dictionary ingestion.
//!
//! Source records are parsed into a [`Lexicon`] of content-word entries, then
//! reduced by the standard pipeline: keep the first sense of every
//! `(lemma, pos)` pair, strip closed-class words, and drop undefined words
//! until every remaining definition token names an entry.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown part of speech {tag:?}")]
    UnknownPos { line: usize, tag: String },
    #[error("no defined words remain")]
    NoDefinedWords,
}

/// Content-word part of speech.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noun" => Ok(Pos::Noun),
            "verb" => Ok(Pos::Verb),
            "adj" => Ok(Pos::Adj),
            "adv" => Ok(Pos::Adv),
            other => Err(other.to_string()),
        }
    }
}

/// One sense of one headword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub lemma: String,
    pub pos: Pos,
    /// 1 = first-listed sense.
    pub sense_rank: u32,
    pub definition: Vec<String>,
    /// 1-based line of the source record (0 for entries built in memory).
    pub source_line: usize,
}

impl LexEntry {
    pub fn new(lemma: impl Into<String>, pos: Pos, definition: Vec<String>) -> Self {
        LexEntry {
            lemma: lemma.into(),
            pos,
            sense_rank: 1,
            definition,
            source_line: 0,
        }
    }

    /// Display name used as vertex label, `lemma#pos`.
    pub fn key(&self) -> String {
        format!("{}#{}", self.lemma, self.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub entries: Vec<LexEntry>,
    pub stoplist_id: String,
    pub normalizer_id: String,
}

impl Lexicon {
    pub fn new(entries: Vec<LexEntry>) -> Self {
        Lexicon {
            entries,
            stoplist_id: "none".to_string(),
            normalizer_id: Normalizer::default().id(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lemma → index of the earliest entry carrying that lemma.
    pub fn lemma_index(&self) -> HashMap<&str, usize> {
        let mut index = HashMap::with_capacity(self.entries.len());
        for (i, e) in self.entries.iter().enumerate() {
            index.entry(e.lemma.as_str()).or_insert(i);
        }
        index
    }

    /// True when every definition token names some entry.
    pub fn is_closed(&self) -> bool {
        let index = self.lemma_index();
        self.entries
            .iter()
            .all(|e| e.definition.iter().all(|t| index.contains_key(t.as_str())))
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.entries {
            let rec = RawRecord {
                lemma: e.lemma.clone(),
                pos: e.pos.as_str().to_string(),
                sense: Some(e.sense_rank),
                definition: e.definition.clone(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Resolves a definition token to the entry for that lemma whose record
/// appeared earliest in the source.
pub fn resolve_token<'a>(lex: &'a Lexicon, token: &str) -> Option<&'a LexEntry> {
    lex.entries.iter().find(|e| e.lemma == token)
}

/// Pluggable stemming hook applied after case folding.
pub trait Stemmer: Send + Sync {
    fn id(&self) -> &str;
    fn stem(&self, token: &str) -> String;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct IdentityStemmer;

impl Stemmer for IdentityStemmer {
    fn id(&self) -> &str {
        "identity"
    }

    fn stem(&self, token: &str) -> String {
        token.to_string()
    }
}

/// Token normalizer shared by headwords, definitions, stoplists and norms:
/// case-fold, strip leading/trailing punctuation, then stem.
#[derive(Clone)]
pub struct Normalizer {
    stemmer: Arc<dyn Stemmer>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer {
            stemmer: Arc::new(IdentityStemmer),
        }
    }
}

impl fmt::Debug for Normalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Normalizer").field("id", &self.id()).finish()
    }
}

impl Normalizer {
    pub fn with_stemmer(stemmer: Arc<dyn Stemmer>) -> Self {
        Normalizer { stemmer }
    }

    pub fn id(&self) -> String {
        format!("casefold+trim-punct+{}", self.stemmer.id())
    }

    /// Returns `None` when nothing is left of the token.
    pub fn normalize(&self, raw: &str) -> Option<String> {
        let folded = raw.trim().to_lowercase();
        let trimmed = folded.trim_matches(|c: char| !c.is_alphanumeric());
        if trimmed.is_empty() {
            return None;
        }
        let stemmed = self.stemmer.stem(trimmed);
        if stemmed.is_empty() {
            None
        } else {
            Some(stemmed)
        }
    }
}

const DEFAULT_STOPWORDS: &str = include_str!("stoplist_en.txt");

/// Set of closed-class words removed from definitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    pub id: String,
    words: HashSet<String>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Stoplist {
            id: "none".to_string(),
            words: HashSet::new(),
        }
    }

    /// Shipped English closed-class list.
    pub fn english_default() -> Self {
        Self::from_reader(DEFAULT_STOPWORDS.as_bytes(), "english-default", &Normalizer::default())
            .expect("bundled stoplist is valid")
    }

    /// One token per line; `#` starts a comment.
    pub fn from_reader<R: BufRead>(
        reader: R,
        id: impl Into<String>,
        normalizer: &Normalizer,
    ) -> std::io::Result<Self> {
        let mut words = HashSet::new();
        for line in reader.lines() {
            let line = line?;
            let content = line.split('#').next().unwrap_or("");
            if let Some(tok) = normalizer.normalize(content) {
                words.insert(tok);
            }
        }
        Ok(Stoplist {
            id: id.into(),
            words,
        })
    }

    pub fn from_words<I, S>(id: impl Into<String>, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Stoplist {
            id: id.into(),
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Tsv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(Format::Jsonl),
            "tsv" => Ok(Format::Tsv),
            other => Err(format!("unknown lexicon format {other:?} (expected jsonl or tsv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownPosPolicy {
    #[default]
    RejectFile,
    SkipRecord,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub on_unknown_pos: UnknownPosPolicy,
    pub normalizer: Normalizer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Parsed {
    pub lexicon: Lexicon,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    lemma: String,
    pos: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sense: Option<u32>,
    definition: Vec<String>,
}

pub fn parse_lexicon<R: BufRead>(
    reader: R,
    format: Format,
    options: &ParseOptions,
) -> Result<Parsed, LexiconError> {
    let norm = &options.normalizer;
    let mut entries = Vec::new();
    let mut diagnostics = Vec::new();
    let mut seen: HashMap<(String, Pos), u32> = HashMap::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw = match format {
            Format::Jsonl => serde_json::from_str::<RawRecord>(&line).map_err(|e| {
                LexiconError::Parse {
                    line: line_no,
                    message: e.to_string(),
                }
            })?,
            Format::Tsv => parse_tsv_line(&line, line_no)?,
        };

        let pos = match raw.pos.parse::<Pos>() {
            Ok(p) => p,
            Err(tag) => match options.on_unknown_pos {
                UnknownPosPolicy::RejectFile => {
                    return Err(LexiconError::UnknownPos { line: line_no, tag })
                }
                UnknownPosPolicy::SkipRecord => {
                    diagnostics.push(Diagnostic {
                        line: line_no,
                        message: format!("skipped record with unknown part of speech {tag:?}"),
                    });
                    continue;
                }
            },
        };
        let lemma = norm.normalize(&raw.lemma).ok_or_else(|| LexiconError::Parse {
            line: line_no,
            message: format!("lemma {:?} is empty after normalization", raw.lemma),
        })?;
        if raw.sense == Some(0) {
            return Err(LexiconError::Parse {
                line: line_no,
                message: "sense must be a positive integer".to_string(),
            });
        }

        let counter = seen.entry((lemma.clone(), pos)).or_insert(0);
        *counter += 1;
        let sense_rank = raw.sense.unwrap_or(*counter);
        let definition = raw
            .definition
            .iter()
            .filter_map(|t| norm.normalize(t))
            .collect();

        entries.push(LexEntry {
            lemma,
            pos,
            sense_rank,
            definition,
            source_line: line_no,
        });
    }

    Ok(Parsed {
        lexicon: Lexicon {
            entries,
            stoplist_id: "none".to_string(),
            normalizer_id: norm.id(),
        },
        diagnostics,
    })
}

fn parse_tsv_line(line: &str, line_no: usize) -> Result<RawRecord, LexiconError> {
    let mut fields = line.splitn(3, '\t');
    match (fields.next(), fields.next(), fields.next()) {
        (Some(lemma), Some(pos), Some(def)) => Ok(RawRecord {
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            sense: None,
            definition: def.split_whitespace().map(str::to_string).collect(),
        }),
        _ => Err(LexiconError::Parse {
            line: line_no,
            message: "expected lemma<TAB>pos<TAB>definition".to_string(),
        }),
    }
}

/// Keeps the first sense of every `(lemma, pos)` pair. Returns the reduced
/// lexicon and the number of entries removed.
pub fn select_first_senses(lex: &Lexicon) -> (Lexicon, usize) {
    let mut best: HashMap<(&str, Pos), usize> = HashMap::new();
    for (i, e) in lex.entries.iter().enumerate() {
        best.entry((e.lemma.as_str(), e.pos))
            .and_modify(|j| {
                if e.sense_rank < lex.entries[*j].sense_rank {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    let keep: HashSet<usize> = best.into_values().collect();
    let entries: Vec<LexEntry> = lex
        .entries
        .iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    let removed = lex.entries.len() - entries.len();
    (
        Lexicon {
            entries,
            ..lex.clone_meta()
        },
        removed,
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StripReport {
    pub entries_removed: usize,
    pub tokens_removed: usize,
}

pub fn strip_function_words(lex: &Lexicon, stoplist: &Stoplist) -> (Lexicon, StripReport) {
    let mut report = StripReport::default();
    let mut entries = Vec::with_capacity(lex.entries.len());
    for e in &lex.entries {
        if stoplist.contains(&e.lemma) {
            report.entries_removed += 1;
            continue;
        }
        let definition: Vec<String> = e
            .definition
            .iter()
            .filter(|t| !stoplist.contains(t))
            .cloned()
            .collect();
        report.tokens_removed += e.definition.len() - definition.len();
        entries.push(LexEntry {
            definition,
            ..e.clone()
        });
    }
    let stoplist_id = if stoplist.is_empty() {
        lex.stoplist_id.clone()
    } else {
        stoplist.id.clone()
    };
    (
        Lexicon {
            entries,
            stoplist_id,
            normalizer_id: lex.normalizer_id.clone(),
        },
        report,
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DropReport {
    pub tokens_dropped: usize,
    pub entries_dropped: usize,
    pub passes: usize,
}

/// Removes undefined tokens and entries left with empty definitions,
/// repeating until nothing changes.
pub fn drop_undefined(lex: &Lexicon) -> Result<(Lexicon, DropReport), LexiconError> {
    let mut report = DropReport::default();
    let mut entries = lex.entries.clone();
    loop {
        report.passes += 1;
        let lemmas: HashSet<String> = entries.iter().map(|e| e.lemma.clone()).collect();
        let mut changed = false;
        for e in entries.iter_mut() {
            let before = e.definition.len();
            e.definition.retain(|t| lemmas.contains(t));
            if e.definition.len() != before {
                report.tokens_dropped += before - e.definition.len();
                changed = true;
            }
        }
        let before = entries.len();
        entries.retain(|e| !e.definition.is_empty());
        if entries.len() != before {
            report.entries_dropped += before - entries.len();
            changed = true;
        }
        if !changed {
            break;
        }
    }
    if entries.is_empty() {
        return Err(LexiconError::NoDefinedWords);
    }
    Ok((
        Lexicon {
            entries,
            ..lex.clone_meta()
        },
        report,
    ))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub input_entries: usize,
    pub extra_senses_removed: usize,
    pub function_entries_removed: usize,
    pub function_tokens_removed: usize,
    pub undefined_tokens_dropped: usize,
    pub undefined_entries_dropped: usize,
    pub output_entries: usize,
    pub stoplist_id: String,
    pub normalizer_id: String,
}

/// First senses, then stoplist stripping, then undefined-word removal.
pub fn prepare(lex: &Lexicon, stoplist: &Stoplist) -> Result<(Lexicon, PipelineReport), LexiconError> {
    let (first, extra) = select_first_senses(lex);
    let (stripped, strip) = strip_function_words(&first, stoplist);
    let (closed, dropped) = drop_undefined(&stripped)?;
    let report = PipelineReport {
        input_entries: lex.len(),
        extra_senses_removed: extra,
        function_entries_removed: strip.entries_removed,
        function_tokens_removed: strip.tokens_removed,
        undefined_tokens_dropped: dropped.tokens_dropped,
        undefined_entries_dropped: dropped.entries_dropped,
        output_entries: closed.len(),
        stoplist_id: closed.stoplist_id.clone(),
        normalizer_id: closed.normalizer_id.clone(),
    };
    Ok((closed, report))
}

impl Lexicon {
    fn clone_meta(&self) -> Lexicon {
        Lexicon {
            entries: Vec::new(),
            stoplist_id: self.stoplist_id.clone(),
            normalizer_id: self.normalizer_id.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Lexicon {
        parse_lexicon(src.as_bytes(), Format::Jsonl, &ParseOptions::default())
            .unwrap()
            .lexicon
    }

    fn entry(lemma: &str, pos: Pos, rank: u32, def: &[&str]) -> LexEntry {
        LexEntry {
            lemma: lemma.to_string(),
            pos,
            sense_rank: rank,
            definition: def.iter().map(|s| s.to_string()).collect(),
            source_line: 0,
        }
    }

    #[test]
    fn single_record() {
        let lex = parse(r#"{"lemma":"apple","pos":"noun","definition":["round","red","fruit"]}"#);
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.entries[0].sense_rank, 1);
        assert_eq!(lex.entries[0].definition, vec!["round", "red", "fruit"]);
    }

    #[test]
    fn senses_ranked_in_file_order() {
        let lex = parse(concat!(
            r#"{"lemma":"bank","pos":"noun","definition":["river","side"]}"#,
            "\n",
            r#"{"lemma":"bank","pos":"noun","definition":["money","place"]}"#,
            "\n"
        ));
        let ranks: Vec<u32> = lex.entries.iter().map(|e| e.sense_rank).collect();
        assert_eq!(ranks, vec![1, 2]);
        assert_eq!(lex.entries[1].source_line, 2);
    }

    #[test]
    fn explicit_sense_is_respected() {
        let lex = parse(r#"{"lemma":"bank","pos":"verb","sense":3,"definition":["tilt"]}"#);
        assert_eq!(lex.entries[0].sense_rank, 3);
        let err = parse_lexicon(
            r#"{"lemma":"bank","pos":"verb","sense":0,"definition":["tilt"]}"#.as_bytes(),
            Format::Jsonl,
            &ParseOptions::default(),
        );
        assert!(matches!(err, Err(LexiconError::Parse { line: 1, .. })));
    }

    #[test]
    fn tokens_are_normalized() {
        let lex = parse(r#"{"lemma":" Apple ","pos":"NOUN","definition":["Red,","(fruit)","!!"]}"#);
        assert_eq!(lex.entries[0].lemma, "apple");
        assert_eq!(lex.entries[0].definition, vec!["red", "fruit"]);
    }

    #[test]
    fn malformed_record_reports_line() {
        let src = "{\"lemma\":\"a\",\"pos\":\"noun\",\"definition\":[\"b\"]}\n\n{not json}\n";
        match parse_lexicon(src.as_bytes(), Format::Jsonl, &ParseOptions::default()) {
            Err(LexiconError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_pos_policies() {
        let src = "x\tprep\ty z\ny\tnoun\tz\n";
        let err = parse_lexicon(src.as_bytes(), Format::Tsv, &ParseOptions::default());
        assert!(matches!(err, Err(LexiconError::UnknownPos { line: 1, .. })));

        let opts = ParseOptions {
            on_unknown_pos: UnknownPosPolicy::SkipRecord,
            ..Default::default()
        };
        let parsed = parse_lexicon(src.as_bytes(), Format::Tsv, &opts).unwrap();
        assert_eq!(parsed.lexicon.len(), 1);
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.diagnostics[0].line, 1);
    }

    #[test]
    fn tsv_requires_three_fields() {
        let err = parse_lexicon("apple\tnoun\n".as_bytes(), Format::Tsv, &ParseOptions::default());
        assert!(matches!(err, Err(LexiconError::Parse { line: 1, .. })));
    }

    #[test]
    fn first_senses() {
        let lex = Lexicon::new(vec![
            entry("bank", Pos::Noun, 1, &["a"]),
            entry("bank", Pos::Noun, 2, &["b"]),
            entry("bank", Pos::Verb, 1, &["c"]),
        ]);
        let (out, removed) = select_first_senses(&lex);
        assert_eq!(removed, 1);
        assert_eq!(out.len(), 2);
        assert_eq!(out.entries[0].definition, vec!["a"]);
        assert_eq!(out.entries[1].pos, Pos::Verb);

        let (again, removed) = select_first_senses(&out);
        assert_eq!(again, out);
        assert_eq!(removed, 0);

        let (empty, _) = select_first_senses(&Lexicon::new(vec![]));
        assert!(empty.is_empty());
    }

    #[test]
    fn stoplist_stripping() {
        let stop = Stoplist::from_words("t", ["a", "of"]);
        let lex = Lexicon::new(vec![
            entry("apple", Pos::Noun, 1, &["a", "round", "fruit"]),
            entry("of", Pos::Adv, 1, &["from"]),
        ]);
        let (out, report) = strip_function_words(&lex, &stop);
        assert_eq!(out.len(), 1);
        assert_eq!(out.entries[0].definition, vec!["round", "fruit"]);
        assert_eq!(report.entries_removed, 1);
        assert_eq!(report.tokens_removed, 1);
        assert_eq!(out.stoplist_id, "t");

        let (same, _) = strip_function_words(&lex, &Stoplist::empty());
        assert_eq!(same.entries, lex.entries);
    }

    #[test]
    fn stoplist_file_format() {
        let src = "# articles\nThe\na  # indefinite\n\nof\n";
        let stop = Stoplist::from_reader(src.as_bytes(), "f", &Normalizer::default()).unwrap();
        assert_eq!(stop.len(), 3);
        assert!(stop.contains("the"));
        assert!(Stoplist::english_default().contains("if"));
        assert!(Stoplist::english_default().contains("his"));
    }

    #[test]
    fn drop_undefined_removes_dangling_tokens() {
        let lex = Lexicon::new(vec![
            entry("a", Pos::Noun, 1, &["b", "zzz"]),
            entry("b", Pos::Noun, 1, &["a"]),
        ]);
        let (out, report) = drop_undefined(&lex).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.entries[0].definition, vec!["b"]);
        assert_eq!(report.tokens_dropped, 1);
        assert_eq!(report.entries_dropped, 0);
    }

    #[test]
    fn drop_undefined_cascades() {
        // c := [zzz] empties, then the reference to c in a's definition goes.
        let lex = Lexicon::new(vec![
            entry("a", Pos::Noun, 1, &["b", "c"]),
            entry("b", Pos::Noun, 1, &["a"]),
            entry("c", Pos::Noun, 1, &["zzz"]),
        ]);
        let (out, report) = drop_undefined(&lex).unwrap();
        let lemmas: Vec<&str> = out.entries.iter().map(|e| e.lemma.as_str()).collect();
        assert_eq!(lemmas, vec!["a", "b"]);
        assert_eq!(out.entries[0].definition, vec!["b"]);
        assert_eq!(report.tokens_dropped, 2);
        assert_eq!(report.entries_dropped, 1);
        assert!(out.is_closed());

        let (again, r2) = drop_undefined(&out).unwrap();
        assert_eq!(again, out);
        assert_eq!((r2.tokens_dropped, r2.entries_dropped), (0, 0));
    }

    #[test]
    fn drop_undefined_empty_result_is_error() {
        let lex = Lexicon::new(vec![entry("c", Pos::Noun, 1, &["zzz"])]);
        assert!(matches!(drop_undefined(&lex), Err(LexiconError::NoDefinedWords)));
    }

    #[test]
    fn resolve_earliest_record() {
        let mut noun = entry("bank", Pos::Noun, 1, &["x"]);
        noun.source_line = 10;
        let mut verb = entry("bank", Pos::Verb, 1, &["y"]);
        verb.source_line = 90;
        let lex = Lexicon::new(vec![noun, verb, entry("river", Pos::Noun, 1, &["bank"])]);
        assert_eq!(resolve_token(&lex, "bank").unwrap().pos, Pos::Noun);
        assert_eq!(resolve_token(&lex, "river").unwrap().lemma, "river");
        assert!(resolve_token(&lex, "zzz").is_none());
        assert_eq!(lex.lemma_index()["bank"], 0);
    }

    #[test]
    fn jsonl_round_trip() {
        let lex = Lexicon::new(vec![
            entry("a", Pos::Adj, 1, &["b"]),
            entry("b", Pos::Adv, 2, &["a", "a"]),
        ]);
        let mut buf = Vec::new();
        lex.write_jsonl(&mut buf).unwrap();
        let back = parse_lexicon(buf.as_slice(), Format::Jsonl, &ParseOptions::default())
            .unwrap()
            .lexicon;
        let strip = |l: &Lexicon| -> Vec<(String, Pos, u32, Vec<String>)> {
            l.entries
                .iter()
                .map(|e| (e.lemma.clone(), e.pos, e.sense_rank, e.definition.clone()))
                .collect()
        };
        assert_eq!(strip(&back), strip(&lex));
    }

    struct ChopS;
    impl Stemmer for ChopS {
        fn id(&self) -> &str {
            "chop-s"
        }
        fn stem(&self, token: &str) -> String {
            token.strip_suffix('s').unwrap_or(token).to_string()
        }
    }

    #[test]
    fn stemmer_hook() {
        let norm = Normalizer::with_stemmer(Arc::new(ChopS));
        assert_eq!(norm.normalize("Fruits.").as_deref(), Some("fruit"));
        assert!(norm.id().ends_with("chop-s"));
    }
}
