//! Psycholinguistic norms joined onto the latent structures: per-structure
//! means, effect sizes, correlations, level gradients, POS breakdowns and
//! MinSet-versus-random comparisons.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::defgraph::{DefGraph, WordId};
use crate::lexicon::{Diagnostic, Normalizer, Pos};
use crate::minset::MinSetSplit;
use crate::structure::{Hierarchy, Label, Scope, StructureLabels};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("negative frequency count {0}")]
    NegativeCount(f64),
    #[error("degenerate samples: pooled standard deviation is zero")]
    DegenerateSamples,
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("paired inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("MinSet part of {part} words exceeds its structure of {population}")]
    PartTooLarge { part: usize, population: usize },
    #[error("at least one random sample is required")]
    NoSamples,
}

#[derive(Debug, Error)]
pub enum NormError {
    #[error("norm file: {0}")]
    Csv(#[from] csv::Error),
    #[error("norm file header must be `word,value`, found {0:?}")]
    Header(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    FrequencyRaw,
    FrequencyLg10wf,
    Aoa,
    Concreteness,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::FrequencyRaw => "frequency_raw",
            NormKind::FrequencyLg10wf => "frequency_lg10wf",
            NormKind::Aoa => "aoa",
            NormKind::Concreteness => "concreteness",
        }
    }

    fn is_frequency(self) -> bool {
        matches!(self, NormKind::FrequencyRaw | NormKind::FrequencyLg10wf)
    }
}

impl FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "frequency_raw" | "raw" => Ok(NormKind::FrequencyRaw),
            "frequency_lg10wf" | "lg10wf" => Ok(NormKind::FrequencyLg10wf),
            "aoa" => Ok(NormKind::Aoa),
            "concreteness" => Ok(NormKind::Concreteness),
            other => Err(format!("unknown norm kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormTable {
    pub kind: NormKind,
    pub values: HashMap<String, f64>,
    /// Identifier of the source file.
    pub provenance: String,
}

impl NormTable {
    pub fn new(kind: NormKind, provenance: impl Into<String>) -> Self {
        NormTable {
            kind,
            values: HashMap::new(),
            provenance: provenance.into(),
        }
    }

    pub fn from_pairs<I, S>(kind: NormKind, pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut t = NormTable::new(kind, "inline");
        for (w, v) in pairs {
            t.values.entry(w.into()).or_insert(v);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, lemma: &str) -> Option<f64> {
        self.values.get(lemma).copied()
    }
}

#[derive(Debug, Clone)]
pub struct LoadedNorms {
    pub table: NormTable,
    /// Rejected rows, duplicates and an empty-file warning.
    pub diagnostics: Vec<Diagnostic>,
}

/// Reads a `word,value` CSV. Words pass through `normalizer`; the first row
/// for a word wins.
pub fn load_norms<R: Read>(
    reader: R,
    kind: NormKind,
    provenance: &str,
    normalizer: &Normalizer,
) -> Result<LoadedNorms, NormError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut table = NormTable::new(kind, provenance);
    let mut diagnostics = Vec::new();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        diagnostics.push(Diagnostic {
            line: 1,
            message: "empty norm file".into(),
        });
        return Ok(LoadedNorms { table, diagnostics });
    }
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if names.len() < 2 || names[0] != "word" || names[1] != "value" {
        return Err(NormError::Header(headers.iter().collect::<Vec<_>>().join(",")));
    }
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let (Some(word), Some(raw)) = (record.get(0), record.get(1)) else {
            diagnostics.push(Diagnostic {
                line,
                message: "expected two fields".into(),
            });
            continue;
        };
        let Some(word) = normalizer.normalize(word) else {
            diagnostics.push(Diagnostic {
                line,
                message: format!("word {word:?} is empty after normalization"),
            });
            continue;
        };
        let value = match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                diagnostics.push(Diagnostic {
                    line,
                    message: format!("non-numeric value {raw:?} for {word:?}"),
                });
                continue;
            }
        };
        if kind.is_frequency() && value < 0.0 {
            diagnostics.push(Diagnostic {
                line,
                message: format!("negative frequency {value} for {word:?}"),
            });
            continue;
        }
        if table.values.contains_key(&word) {
            diagnostics.push(Diagnostic {
                line,
                message: format!("duplicate word {word:?}; keeping the first row"),
            });
            continue;
        }
        table.values.insert(word, value);
    }
    if table.is_empty() && diagnostics.is_empty() {
        diagnostics.push(Diagnostic {
            line: 1,
            message: "empty norm file".into(),
        });
    }
    for d in &diagnostics {
        tracing::warn!(file = provenance, line = d.line, "{}", d.message);
    }
    Ok(LoadedNorms { table, diagnostics })
}

/// `log10(count + 1)`.
pub fn lg10wf(count: f64) -> Result<f64, StatsError> {
    if count < 0.0 || count.is_nan() {
        return Err(StatsError::NegativeCount(count));
    }
    Ok((count + 1.0).log10())
}

/// The three reported variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    /// Lg10WF frequency.
    #[serde(rename = "lg10wf")]
    Frequency,
    Aoa,
    Concreteness,
}

impl Variable {
    pub const ALL: [Variable; 3] = [Variable::Frequency, Variable::Aoa, Variable::Concreteness];

    pub fn as_str(self) -> &'static str {
        match self {
            Variable::Frequency => "lg10wf",
            Variable::Aoa => "aoa",
            Variable::Concreteness => "concreteness",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default)]
pub struct NormTables {
    /// Raw counts or precomputed Lg10WF.
    pub frequency: Option<NormTable>,
    pub aoa: Option<NormTable>,
    pub concreteness: Option<NormTable>,
}

impl NormTables {
    pub fn is_empty(&self) -> bool {
        self.frequency.is_none() && self.aoa.is_none() && self.concreteness.is_none()
    }

    fn table(&self, var: Variable) -> Option<&NormTable> {
        match var {
            Variable::Frequency => self.frequency.as_ref(),
            Variable::Aoa => self.aoa.as_ref(),
            Variable::Concreteness => self.concreteness.as_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordRecord {
    pub word: WordId,
    /// Indexed by [`Variable`]; `None` when the word has no value.
    pub values: [Option<f64>; 3],
}

impl WordRecord {
    pub fn get(&self, var: Variable) -> Option<f64> {
        self.values[var.index()]
    }
}

/// Attaches norm values to every vertex by lemma. A lemma missing from the
/// frequency table gets frequency zero; missing age or concreteness stays
/// absent. Without a frequency table the variable is absent everywhere.
pub fn join_norms(g: &DefGraph, tables: &NormTables) -> Vec<WordRecord> {
    g.vertices()
        .map(|v| {
            let lemma = g.lemma(v);
            let mut values = [None; 3];
            for var in Variable::ALL {
                let Some(t) = tables.table(var) else { continue };
                values[var.index()] = match var {
                    Variable::Frequency => {
                        let raw = t.get(lemma).unwrap_or(0.0);
                        Some(match t.kind {
                            NormKind::FrequencyRaw => lg10wf(raw).unwrap_or(0.0),
                            _ => raw,
                        })
                    }
                    _ => t.get(lemma),
                };
            }
            WordRecord { word: v, values }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Core,
    Satellites,
    Kernel,
    Rest,
    #[serde(rename = "minset_core")]
    MinSetCore,
    #[serde(rename = "minset_satellite")]
    MinSetSatellite,
}

impl Structure {
    pub const ALL: [Structure; 6] = [
        Structure::Core,
        Structure::Satellites,
        Structure::Kernel,
        Structure::Rest,
        Structure::MinSetCore,
        Structure::MinSetSatellite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Structure::Core => "core",
            Structure::Satellites => "satellites",
            Structure::Kernel => "kernel",
            Structure::Rest => "rest",
            Structure::MinSetCore => "minset_core",
            Structure::MinSetSatellite => "minset_satellite",
        }
    }

    pub fn members(self, labels: &StructureLabels, minset: Option<&MinSetSplit>) -> Vec<WordId> {
        match self {
            Structure::Core => labels.with_label(Label::Core),
            Structure::Satellites => labels.with_label(Label::Satellite),
            Structure::Kernel => labels.kernel(),
            Structure::Rest => labels.with_label(Label::Rest),
            Structure::MinSetCore => minset.map(|m| m.core.clone()).unwrap_or_default(),
            Structure::MinSetSatellite => minset.map(|m| m.satellite.clone()).unwrap_or_default(),
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// Words with a value.
    pub covered: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation; needs two values.
    pub sd: Option<f64>,
    /// `covered / count`, zero for an empty structure.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureRow {
    pub structure: Structure,
    pub count: usize,
    pub variables: BTreeMap<Variable, Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectSize {
    pub variable: Variable,
    pub a: Structure,
    pub b: Structure,
    /// Cohen's d of `a` minus `b`; absent when undefined.
    pub d: Option<f64>,
    pub residualized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlation {
    pub x: Variable,
    pub y: Variable,
    pub n: usize,
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub rows: Vec<StructureRow>,
    pub effect_sizes: Vec<EffectSize>,
    pub correlations: Vec<Correlation>,
}

impl StructureReport {
    pub fn row(&self, s: Structure) -> &StructureRow {
        self.rows.iter().find(|r| r.structure == s).expect("every structure has a row")
    }
}

/// The comparisons reported as effect sizes, first minus second.
pub const PRINCIPAL_COMPARISONS: [(Structure, Structure); 4] = [
    (Structure::Core, Structure::Satellites),
    (Structure::Core, Structure::Rest),
    (Structure::Satellites, Structure::Rest),
    (Structure::Kernel, Structure::Rest),
];

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

pub fn summarize(values: &[f64], count: usize) -> Summary {
    Summary {
        covered: values.len(),
        mean: mean(values),
        sd: sample_sd(values),
        coverage: if count == 0 { 0.0 } else { values.len() as f64 / count as f64 },
    }
}

/// Cohen's d with pooled standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::TooFewValues { needed: 2, got: s.len() });
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (sample_sd(a).unwrap(), sample_sd(b).unwrap());
    let pooled = (((na - 1.0) * sa * sa + (nb - 1.0) * sb * sb) / (na + nb - 2.0)).sqrt();
    if pooled == 0.0 {
        return Err(StatsError::DegenerateSamples);
    }
    Ok((mean(a).unwrap() - mean(b).unwrap()) / pooled)
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: xs.len() });
    }
    let (mx, my) = (mean(xs).unwrap(), mean(ys).unwrap());
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Residuals of `target` after an ordinary least-squares fit on `freq`.
pub fn residualize(target: &[f64], freq: &[f64]) -> Result<Vec<f64>, StatsError> {
    if target.len() != freq.len() {
        return Err(StatsError::LengthMismatch(target.len(), freq.len()));
    }
    if target.len() < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: target.len() });
    }
    let (mx, my) = (mean(freq).unwrap(), mean(target).unwrap());
    let sxx: f64 = freq.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let sxy: f64 = freq.iter().zip(target).map(|(x, y)| (x - mx) * (y - my)).sum();
    let beta = sxy / sxx;
    let alpha = my - beta * mx;
    Ok(target
        .iter()
        .zip(freq)
        .map(|(y, x)| y - (alpha + beta * x))
        .collect())
}

fn values_of(records: &[WordRecord], words: &[WordId], var: Variable) -> Vec<f64> {
    words
        .iter()
        .filter_map(|w| records[w.index()].get(var))
        .collect()
}

/// Residualized age and concreteness per word: each target is regressed on
/// Lg10WF over the words that have both values.
pub fn residual_records(records: &[WordRecord]) -> Result<Vec<WordRecord>, StatsError> {
    let mut out: Vec<WordRecord> = records
        .iter()
        .map(|r| WordRecord {
            word: r.word,
            values: [None; 3],
        })
        .collect();
    for var in [Variable::Aoa, Variable::Concreteness] {
        let paired: Vec<(usize, f64, f64)> = records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| Some((i, r.get(var)?, r.get(Variable::Frequency)?)))
            .collect();
        if paired.is_empty() {
            continue;
        }
        let target: Vec<f64> = paired.iter().map(|p| p.1).collect();
        let freq: Vec<f64> = paired.iter().map(|p| p.2).collect();
        let res = residualize(&target, &freq)?;
        for (&(i, _, _), r) in paired.iter().zip(res) {
            out[i].values[var.index()] = Some(r);
        }
    }
    Ok(out)
}

fn effect_sizes(
    records: &[WordRecord],
    members: &BTreeMap<Structure, Vec<WordId>>,
    vars: &[Variable],
    residualized: bool,
) -> Vec<EffectSize> {
    let mut out = Vec::new();
    for &var in vars {
        for (a, b) in PRINCIPAL_COMPARISONS {
            let xa = values_of(records, &members[&a], var);
            let xb = values_of(records, &members[&b], var);
            out.push(EffectSize {
                variable: var,
                a,
                b,
                d: cohens_d(&xa, &xb).ok(),
                residualized,
            });
        }
    }
    out
}

/// Pairwise correlations over all words that have both values.
pub fn correlation_matrix(records: &[WordRecord]) -> Vec<Correlation> {
    let mut out = Vec::new();
    for (i, &x) in Variable::ALL.iter().enumerate() {
        for &y in &Variable::ALL[i + 1..] {
            let (xs, ys): (Vec<f64>, Vec<f64>) =
                records.iter().filter_map(|r| Some((r.get(x)?, r.get(y)?))).unzip();
            out.push(Correlation {
                x,
                y,
                n: xs.len(),
                r: pearson(&xs, &ys).ok(),
            });
        }
    }
    out
}

/// Means, standard deviations and coverage per structure, effect sizes for
/// the principal comparisons (raw and with frequency partialled out of age
/// and concreteness), and the correlation matrix.
pub fn aggregate_by_structure(
    records: &[WordRecord],
    labels: &StructureLabels,
    minset: Option<&MinSetSplit>,
) -> StructureReport {
    let members: BTreeMap<Structure, Vec<WordId>> = Structure::ALL
        .iter()
        .map(|&s| (s, s.members(labels, minset)))
        .collect();
    let rows = Structure::ALL
        .iter()
        .map(|&s| {
            let words = &members[&s];
            let variables = Variable::ALL
                .iter()
                .map(|&var| (var, summarize(&values_of(records, words, var), words.len())))
                .collect();
            StructureRow {
                structure: s,
                count: words.len(),
                variables,
            }
        })
        .collect();
    let mut effects = effect_sizes(records, &members, &Variable::ALL, false);
    if let Ok(residuals) = residual_records(records) {
        effects.extend(effect_sizes(
            &residuals,
            &members,
            &[Variable::Aoa, Variable::Concreteness],
            true,
        ));
    }
    StructureReport {
        rows,
        effect_sizes: effects,
        correlations: correlation_matrix(records),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: u32,
    /// Words at exactly this level.
    pub count: usize,
    /// Words folded into this row, counting merged deeper levels.
    pub total: usize,
    pub merged: bool,
    pub variables: BTreeMap<Variable, Summary>,
}

/// Level groups after truncation: every level past the deepest level with
/// at least `truncate_min_count` words is merged into that level. When no
/// level reaches the threshold nothing is merged.
pub fn truncate_levels(counts: &BTreeMap<u32, usize>, truncate_min_count: usize) -> Vec<(u32, Vec<u32>)> {
    let cutoff = counts
        .iter()
        .filter(|&(_, &c)| c >= truncate_min_count)
        .map(|(&l, _)| l)
        .max();
    let mut groups: Vec<(u32, Vec<u32>)> = Vec::new();
    for &level in counts.keys() {
        match cutoff {
            Some(cut) if level > cut => groups
                .last_mut()
                .expect("the cutoff level precedes merged levels")
                .1
                .push(level),
            _ => groups.push((level, vec![level])),
        }
    }
    groups
}

/// Per-level means and coverage over the words admitted by `scope`, with
/// sparse deep levels merged as in [`truncate_levels`].
pub fn gradient_by_level(
    h: &Hierarchy,
    labels: &StructureLabels,
    records: &[WordRecord],
    scope: Scope,
    truncate_min_count: usize,
) -> Vec<LevelRow> {
    let mut by_level: BTreeMap<u32, Vec<WordId>> = BTreeMap::new();
    for v in labels.in_scope(scope) {
        by_level.entry(h.level(v)).or_default().push(v);
    }
    let counts: BTreeMap<u32, usize> = by_level.iter().map(|(&l, ws)| (l, ws.len())).collect();
    truncate_levels(&counts, truncate_min_count)
        .into_iter()
        .map(|(level, group)| {
            let words: Vec<WordId> = group.iter().flat_map(|l| by_level[l].iter().copied()).collect();
            let variables = Variable::ALL
                .iter()
                .map(|&var| (var, summarize(&values_of(records, &words, var), words.len())))
                .collect();
            LevelRow {
                level,
                count: counts[&level],
                total: words.len(),
                merged: group.len() > 1,
                variables,
            }
        })
        .collect()
}

/// Lemmas sitting at the same level in two hierarchies, per level.
pub fn level_intersection(
    g1: &DefGraph,
    h1: &Hierarchy,
    g2: &DefGraph,
    h2: &Hierarchy,
) -> BTreeMap<u32, BTreeSet<String>> {
    let at_level = |g: &DefGraph, h: &Hierarchy| -> BTreeSet<(u32, String)> {
        g.vertices().map(|v| (h.level(v), g.lemma(v).to_string())).collect()
    };
    let first = at_level(g1, h1);
    let second = at_level(g2, h2);
    let mut out: BTreeMap<u32, BTreeSet<String>> = BTreeMap::new();
    for &l in h1.levels.iter().chain(&h2.levels) {
        out.entry(l).or_default();
    }
    for (level, lemma) in first.intersection(&second) {
        out.entry(*level).or_default().insert(lemma.clone());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosRow {
    pub structure: Structure,
    pub count: usize,
    /// Percent of nouns, verbs, adjectives and adverbs; absent for an empty
    /// structure.
    pub percent: Option<BTreeMap<Pos, f64>>,
}

/// Part-of-speech percentages in the Core, Satellites and Rest.
pub fn pos_breakdown(g: &DefGraph, labels: &StructureLabels) -> Vec<PosRow> {
    [Structure::Core, Structure::Satellites, Structure::Rest]
        .into_iter()
        .map(|s| {
            let words = s.members(labels, None);
            let percent = (!words.is_empty()).then(|| {
                let mut counts: BTreeMap<Pos, usize> = Pos::ALL.iter().map(|&p| (p, 0)).collect();
                for &w in &words {
                    *counts.get_mut(&g.pos(w)).unwrap() += 1;
                }
                counts
                    .into_iter()
                    .map(|(p, c)| (p, 100.0 * c as f64 / words.len() as f64))
                    .collect()
            });
            PosRow {
                structure: s,
                count: words.len(),
                percent,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomBaseline {
    /// Samples in which the variable had at least one value.
    pub samples: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartComparison {
    pub structure: Structure,
    pub part_size: usize,
    pub population: usize,
    pub minset_mean: BTreeMap<Variable, Option<f64>>,
    pub random: BTreeMap<Variable, RandomBaseline>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinSetComparison {
    pub samples: usize,
    pub seed: u64,
    pub core: PartComparison,
    pub satellite: PartComparison,
}

fn compare_part(
    part: &[WordId],
    population: &[WordId],
    structure: Structure,
    records: &[WordRecord],
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PartComparison, StatsError> {
    if part.len() > population.len() {
        return Err(StatsError::PartTooLarge {
            part: part.len(),
            population: population.len(),
        });
    }
    let mut sample_means: BTreeMap<Variable, Vec<f64>> =
        Variable::ALL.iter().map(|&v| (v, Vec::new())).collect();
    for _ in 0..samples {
        let picked: Vec<WordId> = sample(rng, population.len(), part.len())
            .into_iter()
            .map(|i| population[i])
            .collect();
        for var in Variable::ALL {
            if let Some(m) = mean(&values_of(records, &picked, var)) {
                sample_means.get_mut(&var).unwrap().push(m);
            }
        }
    }
    Ok(PartComparison {
        structure,
        part_size: part.len(),
        population: population.len(),
        minset_mean: Variable::ALL
            .iter()
            .map(|&var| (var, mean(&values_of(records, part, var))))
            .collect(),
        random: sample_means
            .into_iter()
            .map(|(var, ms)| {
                (
                    var,
                    RandomBaseline {
                        samples: ms.len(),
                        mean: mean(&ms),
                        sd: sample_sd(&ms),
                    },
                )
            })
            .collect(),
    })
}

/// Compares the Core and Satellite parts of a MinSet with equal-sized
/// uniform random subsets of the Core and the Satellites.
pub fn minset_vs_random(
    split: &MinSetSplit,
    labels: &StructureLabels,
    records: &[WordRecord],
    samples: usize,
    seed: u64,
) -> Result<MinSetComparison, StatsError> {
    if samples == 0 {
        return Err(StatsError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = compare_part(
        &split.core,
        &labels.with_label(Label::Core),
        Structure::MinSetCore,
        records,
        samples,
        &mut rng,
    )?;
    let satellite = compare_part(
        &split.satellite,
        &labels.with_label(Label::Satellite),
        Structure::MinSetSatellite,
        records,
        samples,
        &mut rng,
    )?;
    Ok(MinSetComparison {
        samples,
        seed,
        core,
        satellite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::{hierarchy, label_structures, Aggregator, HierarchyKind};

    const EPS: f64 = 1e-9;

    fn g3_records(g: &DefGraph) -> Vec<WordRecord> {
        let tables = NormTables {
            frequency: Some(NormTable::from_pairs(
                NormKind::FrequencyRaw,
                [("a", 999.0), ("b", 99.0), ("c", 9.0), ("d", 0.0), ("e", 9999.0)],
            )),
            aoa: Some(NormTable::from_pairs(
                NormKind::Aoa,
                [("a", 4.0), ("b", 6.0), ("d", 8.0), ("e", 9.0), ("f", 12.0)],
            )),
            concreteness: None,
        };
        join_norms(g, &tables)
    }

    #[test]
    fn lg10wf_values() {
        assert_eq!(lg10wf(0.0).unwrap(), 0.0);
        assert_eq!(lg10wf(999.0).unwrap(), 3.0);
        assert!((lg10wf(1.0).unwrap() - 2f64.log10()).abs() < 1e-12);
        assert!(lg10wf(-1.0).is_err());
    }

    #[test]
    fn load_norms_rows_and_diagnostics() {
        let n = Normalizer::default();
        let t = load_norms("word,value\napple,3.1\n".as_bytes(), NormKind::Aoa, "t", &n).unwrap();
        assert_eq!(t.table.len(), 1);
        assert_eq!(t.table.get("apple"), Some(3.1));

        let t = load_norms(
            "word,value\nApple,1\napple,2\npear,abc\n".as_bytes(),
            NormKind::Concreteness,
            "t",
            &n,
        )
        .unwrap();
        assert_eq!(t.table.get("apple"), Some(1.0));
        assert_eq!(t.table.len(), 1);
        assert_eq!(t.diagnostics.len(), 2);
        assert_eq!(t.diagnostics[0].line, 3);

        let t = load_norms("".as_bytes(), NormKind::Aoa, "t", &n).unwrap();
        assert!(t.table.is_empty());
        assert_eq!(t.diagnostics.len(), 1);

        assert!(load_norms("lemma,score\na,1\n".as_bytes(), NormKind::Aoa, "t", &n).is_err());
    }

    #[test]
    fn negative_frequency_rejected() {
        let n = Normalizer::default();
        let t = load_norms("word,value\na,-3\n".as_bytes(), NormKind::FrequencyRaw, "t", &n).unwrap();
        assert!(t.table.is_empty());
        assert_eq!(t.diagnostics.len(), 1);
    }

    #[test]
    fn join_defaults_frequency_to_zero() {
        let g = fixtures::g3();
        let rec = g3_records(&g);
        let f = g.find("f").unwrap();
        assert_eq!(rec[f.index()].get(Variable::Frequency), Some(0.0));
        let c = g.find("c").unwrap();
        assert_eq!(rec[c.index()].get(Variable::Aoa), None);
        assert_eq!(rec[c.index()].get(Variable::Concreteness), None);
        let a = g.find("a").unwrap();
        assert_eq!(rec[a.index()].get(Variable::Frequency), Some(3.0));
    }

    #[test]
    fn aggregate_on_g3() {
        let g = fixtures::g3();
        let labels = label_structures(&g);
        let rec = g3_records(&g);
        let report = aggregate_by_structure(&rec, &labels, None);
        let core = report.row(Structure::Core);
        assert_eq!(core.count, 3);
        let age = &core.variables[&Variable::Aoa];
        assert_eq!(age.covered, 2);
        assert!((age.mean.unwrap() - 5.0).abs() < EPS);
        assert!((age.coverage - 2.0 / 3.0).abs() < EPS);
        let kernel_age = &report.row(Structure::Kernel).variables[&Variable::Aoa];
        assert!((kernel_age.mean.unwrap() - 27.0 / 4.0).abs() < EPS);
        let rest = report.row(Structure::Rest);
        assert_eq!(rest.variables[&Variable::Aoa].mean, Some(12.0));
        assert_eq!(rest.variables[&Variable::Aoa].sd, None);
        let empty = report.row(Structure::MinSetCore);
        assert_eq!(empty.count, 0);
        assert_eq!(empty.variables[&Variable::Aoa].mean, None);
        assert_eq!(empty.variables[&Variable::Aoa].coverage, 0.0);
    }

    #[test]
    fn cohens_d_fixtures() {
        assert!((cohens_d(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap() + 1.0).abs() < EPS);
        assert_eq!(cohens_d(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(cohens_d(&[5.0, 5.0], &[5.0, 5.0]), Err(StatsError::DegenerateSamples));
        assert!(cohens_d(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pearson_fixtures() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < EPS);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < EPS);
        // By hand: mean x 3.5, mean y 4; sxy 21, sxx 17.5, syy 32.
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let ys = [2.0, 1.0, 4.0, 3.0, 7.0, 7.0];
        let expected = 21.0 / (17.5f64.sqrt() * 32.0f64.sqrt());
        assert!((pearson(&xs, &ys).unwrap() - expected).abs() < EPS);
        assert_eq!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn residualize_fixtures() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let linear: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        assert!(residualize(&linear, &x).unwrap().iter().all(|r| r.abs() < EPS));
        let constant = [7.0; 4];
        assert!(residualize(&constant, &x).unwrap().iter().all(|r| r.abs() < EPS));
        // y = 1, 3, 2, 5, 4 on x = 1..5: beta 0.8, alpha 0.6.
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [1.0, 3.0, 2.0, 5.0, 4.0];
        let res = residualize(&ys, &xs).unwrap();
        let expected = [-0.4, 0.8, -1.0, 1.2, -0.6];
        for (r, e) in res.iter().zip(expected) {
            assert!((r - e).abs() < EPS);
        }
        assert!(pearson(&res, &xs).unwrap().abs() < EPS);
        assert_eq!(residualize(&ys, &[1.0; 5]), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn truncation_merges_the_tail() {
        let counts: BTreeMap<u32, usize> = [(0, 100), (1, 40), (2, 5), (3, 2)].into_iter().collect();
        let groups = truncate_levels(&counts, 10);
        assert_eq!(groups, vec![(0, vec![0]), (1, vec![1, 2, 3])]);
        assert_eq!(truncate_levels(&counts, 1).len(), 4);
        // No level qualifies: nothing merged.
        assert_eq!(truncate_levels(&counts, 1000).len(), 4);
    }

    #[test]
    fn gradient_on_g3() {
        let g = fixtures::g3();
        let labels = label_structures(&g);
        let rec = g3_records(&g);
        let h = hierarchy(&g, &labels, HierarchyKind::K, Aggregator::Max).unwrap();
        let rows = gradient_by_level(&h, &labels, &rec, Scope::All, 1);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].level, 1);
        assert_eq!(rows[1].variables[&Variable::Aoa].mean, Some(12.0));
        let merged = gradient_by_level(&h, &labels, &rec, Scope::All, 2);
        assert_eq!(merged.len(), 1);
        assert_eq!((merged[0].count, merged[0].total), (5, 6));
    }

    #[test]
    fn level_intersection_shared_word() {
        let g1 = fixtures::graph_from_defs(&[("a", &["a"]), ("b", &["a"]), ("c", &["b"])]);
        let g2 = fixtures::graph_from_defs(&[("x", &["x"]), ("y", &["x"]), ("c", &["y"])]);
        let l1 = label_structures(&g1);
        let l2 = label_structures(&g2);
        let h1 = hierarchy(&g1, &l1, HierarchyKind::K, Aggregator::Max).unwrap();
        let h2 = hierarchy(&g2, &l2, HierarchyKind::K, Aggregator::Max).unwrap();
        let common = level_intersection(&g1, &h1, &g2, &h2);
        assert_eq!(common[&2], BTreeSet::from(["c".to_string()]));
        assert!(common[&0].is_empty());
        assert!(common[&1].is_empty());
        let same = level_intersection(&g1, &h1, &g1, &h1);
        assert_eq!(same[&0].len(), 1);
    }

    #[test]
    fn pos_breakdown_percentages() {
        let g = fixtures::g3();
        let labels = label_structures(&g);
        let rows = pos_breakdown(&g, &labels);
        assert_eq!(rows.len(), 3);
        let core = rows[0].percent.as_ref().unwrap();
        assert!((core.values().sum::<f64>() - 100.0).abs() < EPS);
        assert_eq!(core[&Pos::Noun], 100.0);
    }

    #[test]
    fn minset_comparison_is_seeded() {
        let g = fixtures::g3();
        let labels = label_structures(&g);
        let rec = g3_records(&g);
        let split = MinSetSplit {
            core: vec![g.find("a").unwrap()],
            satellite: vec![g.find("d").unwrap()],
        };
        let r1 = minset_vs_random(&split, &labels, &rec, 3, 11).unwrap();
        let r2 = minset_vs_random(&split, &labels, &rec, 3, 11).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.core.minset_mean[&Variable::Aoa], Some(4.0));
        assert_eq!(r1.core.random[&Variable::Frequency].samples, 3);

        let whole = MinSetSplit {
            core: labels.with_label(Label::Core),
            satellite: Vec::new(),
        };
        let r = minset_vs_random(&whole, &labels, &rec, 4, 0).unwrap();
        let f = Variable::Frequency;
        assert!((r.core.random[&f].mean.unwrap() - r.core.minset_mean[&f].unwrap()).abs() < EPS);
        assert!(r.core.random[&f].sd.unwrap().abs() < EPS);

        let too_big = MinSetSplit {
            core: Vec::new(),
            satellite: labels.kernel(),
        };
        assert!(matches!(
            minset_vs_random(&too_big, &labels, &rec, 1, 0),
            Err(StatsError::PartTooLarge { .. })
        ));
    }
}
