//! `lexkernel` subcommands: `ingest`, `analyze`, `report` and `serve`.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lexkernel::defgraph::DefGraph;
use lexkernel::export::{self, MinSetJson};
use lexkernel::lexicon::{
    drop_undefined, parse_lexicon, prepare, select_first_senses, strip_function_words, Format, Lexicon,
    Normalizer, ParseOptions, Stoplist, UnknownPosPolicy,
};
use lexkernel::minset::{solve_minset, split_minset, MinSetResult, MinSetSplit, SolveMode, SolveOptions};
use lexkernel::psychstats::{
    aggregate_by_structure, gradient_by_level, join_norms, load_norms, minset_vs_random, pos_breakdown, NormKind,
    NormTable, NormTables,
};
use lexkernel::structure::{hierarchy, label_structures, level_counts, Aggregator, HierarchyKind, Scope, StructureLabels};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "lexkernel", version, about = "Latent structure of dictionary graphs")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a dictionary and write the cleaned, closed lexicon.
    Ingest(IngestArgs),
    /// Kernel, Core, Satellites, hierarchies and a MinSet.
    Analyze(AnalyzeArgs),
    /// Join psycholinguistic norms and write the statistics tables.
    Report(ReportArgs),
    /// Run the dictionary game HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Jsonl,
    Tsv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PosPolicyArg {
    Reject,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MinSetArg {
    Exact,
    Auto,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregatorArg {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FreqKindArg {
    /// Raw counts, converted with log10(count + 1).
    Raw,
    /// Values already on the Lg10WF scale.
    Lg10wf,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Dictionary file.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: FormatArg,
    /// Function-word list: a file, `default` for the bundled English list,
    /// or `none`.
    #[arg(long, value_name = "PATH|default|none")]
    pub stoplist: Option<String>,
    /// What to do with records whose POS is not noun, verb, adj or adv.
    #[arg(long, value_enum, default_value = "reject")]
    pub on_unknown_pos: PosPolicyArg,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "auto")]
    pub minset: MinSetArg,
    /// Solver time limit in seconds.
    #[arg(long, default_value_t = 60.0, value_name = "SECONDS")]
    pub budget: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "max")]
    pub aggregator: AggregatorArg,
    /// Levels past the deepest level holding at least N words are merged
    /// into it in the level tables.
    #[arg(long, default_value_t = 100, value_name = "N")]
    pub truncate: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Frequency norms (`word,value` CSV).
    #[arg(long, value_name = "PATH")]
    pub freq: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "raw")]
    pub freq_kind: FreqKindArg,
    /// Age-of-acquisition norms.
    #[arg(long, value_name = "PATH")]
    pub aoa: Option<PathBuf>,
    /// Concreteness norms.
    #[arg(long, value_name = "PATH")]
    pub conc: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "max")]
    pub aggregator: AggregatorArg,
    #[arg(long, default_value_t = 100, value_name = "N")]
    pub truncate: usize,
    /// Random subsets drawn per MinSet part for the comparison.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: IpAddr,
    /// Where session event logs live.
    #[arg(long, value_name = "DIR")]
    pub data_dir: PathBuf,
    /// Web client bundle served at `/`.
    #[arg(long, value_name = "DIR")]
    pub static_dir: Option<PathBuf>,
    #[arg(long, value_name = "PATH|default|none")]
    pub stoplist: Option<String>,
    /// Solver time limit for session analysis, in seconds.
    #[arg(long, default_value_t = 30.0, value_name = "SECONDS")]
    pub budget: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation: exit status 2.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn failed<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Failed(format!("{context}: {e}"))
}

fn require_file(p: &Path, what: &str) -> Result<(), CliError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{what} {} does not exist", p.display())))
    }
}

fn budget(seconds: f64) -> Result<Duration, CliError> {
    if seconds.is_finite() && seconds > 0.0 {
        Ok(Duration::from_secs_f64(seconds))
    } else {
        Err(CliError::Usage(format!("--budget must be positive, got {seconds}")))
    }
}

fn stoplist(choice: Option<&str>, default: Stoplist) -> Result<Stoplist, CliError> {
    match choice {
        None => Ok(default),
        Some("default") => Ok(Stoplist::english_default()),
        Some("none") => Ok(Stoplist::empty()),
        Some(path) => {
            let p = Path::new(path);
            require_file(p, "stoplist")?;
            let f = File::open(p).map_err(failed("stoplist"))?;
            Stoplist::from_reader(BufReader::new(f), path, &Normalizer::default()).map_err(failed("stoplist"))
        }
    }
}

fn create_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(failed("output directory"))
}

fn write_file(dir: &Path, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(failed(name))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(failed(name))?;
    tracing::info!(path = %path.display(), "wrote");
    Ok(())
}

struct Loaded {
    raw_entries: usize,
    first_sense: usize,
    lexicon: Lexicon,
}

/// Reads and cleans a dictionary. The function-word list is applied only
/// when `stop` is given; first-sense selection and undefined-word removal
/// always run and change nothing on an already cleaned lexicon.
fn load(input: &InputArgs, stop: Option<&Stoplist>) -> Result<Loaded, CliError> {
    require_file(&input.input, "input")?;
    let f = File::open(&input.input).map_err(failed("input"))?;
    let opts = ParseOptions {
        on_unknown_pos: match input.on_unknown_pos {
            PosPolicyArg::Reject => UnknownPosPolicy::RejectFile,
            PosPolicyArg::Skip => UnknownPosPolicy::SkipRecord,
        },
        ..Default::default()
    };
    let format = match input.format {
        FormatArg::Jsonl => Format::Jsonl,
        FormatArg::Tsv => Format::Tsv,
    };
    let parsed = parse_lexicon(BufReader::new(f), format, &opts).map_err(failed("parse"))?;
    for d in &parsed.diagnostics {
        tracing::warn!(line = d.line, "{}", d.message);
    }
    let raw_entries = parsed.lexicon.len();
    let (first, _) = select_first_senses(&parsed.lexicon);
    let first_sense = first.len();
    let stripped = match stop {
        Some(s) => strip_function_words(&first, s).0,
        None => first,
    };
    let (lexicon, _) = drop_undefined(&stripped).map_err(failed("lexicon"))?;
    Ok(Loaded {
        raw_entries,
        first_sense,
        lexicon,
    })
}

/// Settings behind a set of outputs, written as `run.json`.
#[derive(Serialize)]
struct RunInfo<'a> {
    command: &'static str,
    input: String,
    stoplist: &'a str,
    aggregator: &'static str,
    truncate: usize,
    minset: &'static str,
    budget_seconds: f64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ReportInfo>,
}

#[derive(Serialize)]
struct ReportInfo {
    frequency: Option<String>,
    frequency_kind: &'static str,
    aoa: Option<String>,
    concreteness: Option<String>,
    samples: usize,
    effect_size: &'static str,
    residualization: &'static str,
}

impl<'a> RunInfo<'a> {
    fn new(command: &'static str, input: &'a InputArgs, aggregator: Aggregator, truncate: usize, solver: &SolverArgs) -> Self {
        RunInfo {
            command,
            input: input.input.display().to_string(),
            stoplist: input.stoplist.as_deref().unwrap_or("none"),
            aggregator: aggregator.as_str(),
            truncate,
            minset: match solver.minset {
                MinSetArg::Exact => "exact",
                MinSetArg::Auto => "auto",
                MinSetArg::Off => "off",
            },
            budget_seconds: solver.budget,
            seed: solver.seed,
            report: None,
        }
    }
}

fn aggregator(a: AggregatorArg) -> Aggregator {
    match a {
        AggregatorArg::Max => Aggregator::Max,
        AggregatorArg::Min => Aggregator::Min,
    }
}

fn solve(
    g: &DefGraph,
    labels: &StructureLabels,
    args: &SolverArgs,
) -> Result<Option<(MinSetResult, MinSetSplit)>, CliError> {
    let mode = match args.minset {
        MinSetArg::Off => return Ok(None),
        MinSetArg::Exact => SolveMode::Exact,
        MinSetArg::Auto => SolveMode::Auto,
    };
    let opts = SolveOptions {
        budget: budget(args.budget)?,
        mode,
        seed: args.seed,
    };
    let m = solve_minset(g, &opts).map_err(failed("minset"))?;
    tracing::info!(
        size = m.size(),
        status = %m.status,
        lower_bound = m.lower_bound,
        nodes = m.stats.nodes,
        circuits = m.stats.circuits,
        wall_ms = m.stats.wall_time.as_millis() as u64,
        "minset solved"
    );
    let split = split_minset(&m, labels).map_err(failed("minset"))?;
    Ok(Some((m, split)))
}

#[derive(Serialize)]
struct IngestReport<'a> {
    #[serde(flatten)]
    pipeline: &'a lexkernel::lexicon::PipelineReport,
    diagnostics: &'a [lexkernel::lexicon::Diagnostic],
}

pub fn ingest(args: &IngestArgs) -> Result<(), CliError> {
    let stop = stoplist(args.input.stoplist.as_deref(), Stoplist::english_default())?;
    require_file(&args.input.input, "input")?;
    let f = File::open(&args.input.input).map_err(failed("input"))?;
    let opts = ParseOptions {
        on_unknown_pos: match args.input.on_unknown_pos {
            PosPolicyArg::Reject => UnknownPosPolicy::RejectFile,
            PosPolicyArg::Skip => UnknownPosPolicy::SkipRecord,
        },
        ..Default::default()
    };
    let format = match args.input.format {
        FormatArg::Jsonl => Format::Jsonl,
        FormatArg::Tsv => Format::Tsv,
    };
    let parsed = parse_lexicon(BufReader::new(f), format, &opts).map_err(failed("parse"))?;
    let (lex, report) = prepare(&parsed.lexicon, &stop).map_err(failed("lexicon"))?;
    create_out(&args.out)?;
    write_file(&args.out, "lexicon.jsonl", |w| lex.write_jsonl(w))?;
    write_file(&args.out, "ingest_report.json", |w| {
        export::write_json(
            w,
            &IngestReport {
                pipeline: &report,
                diagnostics: &parsed.diagnostics,
            },
        )
    })?;
    eprintln!(
        "ingested {} records into {} closed entries",
        report.input_entries, report.output_entries
    );
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    budget(args.solver.budget)?;
    let stop = args
        .input
        .stoplist
        .as_deref()
        .map(|s| stoplist(Some(s), Stoplist::empty()))
        .transpose()?;
    let loaded = load(&args.input, stop.as_ref())?;
    let g = DefGraph::from_lexicon(&loaded.lexicon).map_err(failed("graph"))?;
    let labels = label_structures(&g);
    let agg = aggregator(args.aggregator);
    let minset = solve(&g, &labels, &args.solver)?;

    create_out(&args.out)?;
    let info = RunInfo::new("analyze", &args.input, agg, args.truncate, &args.solver);
    write_file(&args.out, "run.json", |w| export::write_json(w, &info))?;
    let kernel_empty = labels.kernel().is_empty();
    let c = hierarchy(&g, &labels, HierarchyKind::C, agg).map_err(failed("hierarchy"))?;
    if kernel_empty {
        tracing::warn!("empty kernel: no K-hierarchy");
    }
    let k = hierarchy(&g, &labels, HierarchyKind::K, agg).ok();
    let k_or_c = k.as_ref().unwrap_or(&c);
    write_file(&args.out, "labels.csv", |w| {
        if k.is_some() {
            export::write_labels_csv(w, &g, &labels, k_or_c, &c)
        } else {
            // Without a kernel every word is Rest and has no K level; write
            // the C levels in both columns rather than invent one.
            export::write_labels_csv(w, &g, &labels, &c, &c)
        }
    })?;
    write_file(&args.out, "edges.tsv", |w| g.write_edges(w))?;
    let split = minset.as_ref().map(|(_, s)| s);
    write_file(&args.out, "table1.csv", |w| {
        export::write_table1(w, &export::table1(loaded.raw_entries, loaded.first_sense, &labels, split))
    })?;
    if let Some(k) = &k {
        write_file(&args.out, "table2_k.csv", |w| {
            export::write_level_table(w, &level_counts(k, &labels, Scope::All), args.truncate)
        })?;
    }
    write_file(&args.out, "table2_c.csv", |w| {
        export::write_level_table(w, &level_counts(&c, &labels, Scope::Kernel), args.truncate)
    })?;
    if let Some((m, split)) = &minset {
        write_file(&args.out, "minset.json", |w| export::write_json(w, &MinSetJson::new(&g, m, split)))?;
    }
    eprintln!(
        "{} words: kernel {}, core {}, satellites {}, rest {}{}",
        g.len(),
        labels.kernel().len(),
        labels.with_label(lexkernel::structure::Label::Core).len(),
        labels.with_label(lexkernel::structure::Label::Satellite).len(),
        labels.with_label(lexkernel::structure::Label::Rest).len(),
        minset
            .as_ref()
            .map(|(m, _)| format!(", minset {} ({})", m.size(), m.status))
            .unwrap_or_default(),
    );
    Ok(())
}

fn norm_table(path: &Path, kind: NormKind) -> Result<NormTable, CliError> {
    let f = File::open(path).map_err(failed("norms"))?;
    let loaded = load_norms(BufReader::new(f), kind, &path.display().to_string(), &Normalizer::default())
        .map_err(failed("norms"))?;
    Ok(loaded.table)
}

pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    if args.freq.is_none() && args.aoa.is_none() && args.conc.is_none() {
        return Err(CliError::Usage("report needs at least one of --freq, --aoa, --conc".into()));
    }
    for p in [&args.freq, &args.aoa, &args.conc].into_iter().flatten() {
        require_file(p, "norm file")?;
    }
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    budget(args.solver.budget)?;
    let stop = args
        .input
        .stoplist
        .as_deref()
        .map(|s| stoplist(Some(s), Stoplist::empty()))
        .transpose()?;
    let loaded = load(&args.input, stop.as_ref())?;
    let g = DefGraph::from_lexicon(&loaded.lexicon).map_err(failed("graph"))?;
    let labels = label_structures(&g);
    let freq_kind = match args.freq_kind {
        FreqKindArg::Raw => NormKind::FrequencyRaw,
        FreqKindArg::Lg10wf => NormKind::FrequencyLg10wf,
    };
    let tables = NormTables {
        frequency: args.freq.as_deref().map(|p| norm_table(p, freq_kind)).transpose()?,
        aoa: args.aoa.as_deref().map(|p| norm_table(p, NormKind::Aoa)).transpose()?,
        concreteness: args.conc.as_deref().map(|p| norm_table(p, NormKind::Concreteness)).transpose()?,
    };
    let records = join_norms(&g, &tables);
    let minset = solve(&g, &labels, &args.solver)?;
    let split = minset.as_ref().map(|(_, s)| s);
    let agg = aggregator(args.aggregator);

    create_out(&args.out)?;
    let shown = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    let mut info = RunInfo::new("report", &args.input, agg, args.truncate, &args.solver);
    info.report = Some(ReportInfo {
        frequency: shown(&args.freq),
        frequency_kind: match args.freq_kind {
            FreqKindArg::Raw => "raw",
            FreqKindArg::Lg10wf => "lg10wf",
        },
        aoa: shown(&args.aoa),
        concreteness: shown(&args.conc),
        samples: args.samples,
        effect_size: "cohens_d_pooled_sd",
        residualization: "ols_target_on_lg10wf",
    });
    write_file(&args.out, "run.json", |w| export::write_json(w, &info))?;
    let structure = aggregate_by_structure(&records, &labels, split);
    write_file(&args.out, "structure_report.csv", |w| export::write_structure_report(w, &structure))?;
    write_file(&args.out, "effect_sizes.csv", |w| export::write_effect_sizes(w, &structure.effect_sizes))?;
    write_file(&args.out, "correlations.csv", |w| export::write_correlations(w, &structure.correlations))?;
    if let Ok(k) = hierarchy(&g, &labels, HierarchyKind::K, agg) {
        let rows = gradient_by_level(&k, &labels, &records, Scope::All, args.truncate);
        write_file(&args.out, "gradients_K.csv", |w| export::write_gradients(w, &rows))?;
    } else {
        tracing::warn!("empty kernel: no K-hierarchy gradients");
    }
    let c = hierarchy(&g, &labels, HierarchyKind::C, agg).map_err(failed("hierarchy"))?;
    let rows = gradient_by_level(&c, &labels, &records, Scope::Kernel, args.truncate);
    write_file(&args.out, "gradients_C.csv", |w| export::write_gradients(w, &rows))?;
    write_file(&args.out, "pos_breakdown.csv", |w| export::write_pos_breakdown(w, &pos_breakdown(&g, &labels)))?;
    if let Some((_, split)) = &minset {
        let cmp = minset_vs_random(split, &labels, &records, args.samples, args.solver.seed)
            .map_err(failed("minset comparison"))?;
        write_file(&args.out, "minset_comparison.json", |w| export::write_json(w, &cmp))?;
    }
    eprintln!("report written to {}", args.out.display());
    Ok(())
}

pub fn serve(args: &ServeArgs) -> Result<(), CliError> {
    use lexkernel_game::{AppState, Rules, SessionStore};
    if let Some(dir) = &args.static_dir {
        if !dir.is_dir() {
            return Err(CliError::Usage(format!("static directory {} does not exist", dir.display())));
        }
    }
    let analysis_budget = budget(args.budget)?;
    let rules = Rules {
        stoplist: stoplist(args.stoplist.as_deref(), Stoplist::english_default())?,
        ..Rules::default()
    };
    let store = SessionStore::open(&args.data_dir, rules).map_err(failed("data directory"))?;
    let mut state = AppState::new(store);
    state.analysis_budget = analysis_budget;
    let addr = SocketAddr::new(args.bind, args.port);
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(failed("runtime"))?;
    rt.block_on(lexkernel_game::serve(addr, state, args.static_dir.clone()))
        .map_err(failed("server"))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(failed("thread pool"))?;
    }
    match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Analyze(a) => analyze(a),
        Command::Report(a) => report(a),
        Command::Serve(a) => serve(a),
    }
}
