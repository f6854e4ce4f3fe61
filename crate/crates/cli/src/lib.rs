//! Command-line front end: stats, train, query, pool, verify, bench.
//!
//! Settings resolve as flag, then `--config` file (flat `key=value`), then
//! default. Every output starts with `# ` provenance lines naming the engine
//! version, the SHA-256 of each input file and the resolved configuration.

mod config;
mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use thiserror::Error;

use ctxpool::bench::run_bench;
use ctxpool::cnf::{
    read_cnf_file, write_cnf_file, Algorithm, Cnf, MetricMode, SizeRange, TrainConfig,
};
use ctxpool::dataset::{split_stats, SplitId, SPLIT_FILES};
use ctxpool::kg::{load_triple_files, GraphStats};
use ctxpool::pooling::{
    build_context_graph, export_context_graph, write_context_graph, PoolOptions,
};
use ctxpool::{EntityId, KnowledgeGraph, RelationId};

pub use config::ConfigFile;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_CAPACITY: u8 = 4;
pub const EXIT_VERIFY: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resolve(String),
    #[error("{0}")]
    Verification(String),
    #[error(transparent)]
    Engine(#[from] ctxpool::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Resolve(_) => EXIT_DATA,
            CliError::Verification(_) => EXIT_VERIFY,
            CliError::Engine(ctxpool::Error::Capacity(_)) => EXIT_CAPACITY,
            CliError::Engine(ctxpool::Error::Config(_)) => EXIT_USAGE,
            CliError::Engine(_) => EXIT_DATA,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "ctxpool",
    version,
    about = "Context pooling over knowledge graphs"
)]
pub struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "CONTEXT_POOL_THREADS")]
    pub threads: Option<usize>,

    /// Flat key=value file supplying defaults for unset flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relation, entity and triple counts of a dataset directory or benchmark split.
    Stats(StatsArgs),
    /// Train a context neighbor family and write it to a file.
    Train(TrainArgs),
    /// Print the neighbor relations selected for a (head, relation) query.
    Query(QueryArgs),
    /// Build and export the context graph of a query.
    Pool(PoolArgs),
    /// Run an oracle suite; exits nonzero if any check fails.
    Verify(VerifyArgs),
    /// Time exhaustive against optimized family training.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Directory holding train.txt, valid.txt and test.txt.
    pub dir: Option<PathBuf>,
    /// Benchmark split such as fb237-ind-v1; reports its training and testing graphs.
    #[arg(long, conflicts_with = "dir")]
    pub split: Option<String>,
    /// Folder containing the benchmark split directories.
    #[arg(long, env = "CONTEXT_POOL_DATA", default_value = "data")]
    pub data: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TrainingFlags {
    #[arg(long)]
    pub algorithm: Option<Algorithm>,
    /// precision, recall or both.
    #[arg(long)]
    pub metric: Option<MetricMode>,
    #[arg(long)]
    pub threshold_pre: Option<f64>,
    #[arg(long)]
    pub threshold_rec: Option<f64>,
    /// Half-open set-size range lo:hi (exhaustive only).
    #[arg(long)]
    pub set_sizes: Option<SizeRange>,
    /// Widest neighborhood enumerated in full when no set-size range is given.
    #[arg(long)]
    pub power_set_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Triple files forming the training graph.
    #[arg(long = "graph", required = true, num_args = 1..)]
    pub graph: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub training: TrainingFlags,
}

#[derive(Debug, Args)]
pub struct GraphSources {
    /// Triple files used both for the family vocabulary and for neighborhoods.
    #[arg(long, num_args = 1.., conflicts_with_all = ["cnf_graph", "expand_graph"])]
    pub graph: Vec<PathBuf>,
    /// Graph the family was trained on (inductive mode).
    #[arg(long, num_args = 1.., requires = "expand_graph")]
    pub cnf_graph: Vec<PathBuf>,
    /// Graph whose neighborhoods and edges are expanded (inductive mode).
    #[arg(long, num_args = 1.., requires = "cnf_graph")]
    pub expand_graph: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// (head, relation, ?)
    Head,
    /// (?, relation, tail), posed as (tail, relation^-1, ?)
    Tail,
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Direction as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub sources: GraphSources,
    #[arg(long)]
    pub cnf: PathBuf,
    /// Query entity name.
    #[arg(long)]
    pub head: String,
    #[arg(long)]
    pub relation: String,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[command(flatten)]
    pub sources: GraphSources,
    #[arg(long)]
    pub cnf: PathBuf,
    /// Query entity name (the tail entity when --direction tail).
    #[arg(long)]
    pub head: String,
    #[arg(long)]
    pub relation: String,
    #[arg(long)]
    pub hops: Option<usize>,
    #[arg(long, value_enum)]
    pub direction: Option<Direction>,
    /// Abort if one layer exceeds this many edges.
    #[arg(long)]
    pub max_layer_edges: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Metrics,
    Cnf,
    Theorem,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Number of random graphs (metrics, cnf).
    #[arg(long, default_value_t = 200)]
    pub seeds: u64,
    #[arg(long)]
    pub max_entities: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub max_relations: usize,
    /// Queries per graph (metrics).
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    /// Population size (theorem).
    #[arg(long, default_value_t = 10_000)]
    pub entities: usize,
    /// Relation count (theorem).
    #[arg(long, default_value_t = 5)]
    pub relations: usize,
    /// Occurrence probability of each relation (theorem).
    #[arg(long, default_value_t = 0.3)]
    pub prob: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Size of the checked relation sets (theorem).
    #[arg(long, default_value_t = 2)]
    pub set_size: usize,
    /// Largest admissible deviation (theorem); 0.02 for pairs, 0.03 for larger sets.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write per-sample deviations as TSV (theorem).
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Triple files of the benchmarked graph.
    #[arg(long, num_args = 1.., conflicts_with = "split")]
    pub graph: Vec<PathBuf>,
    /// Benchmark split whose training graph is timed, e.g. wn18rr-ind-v1.
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long, env = "CONTEXT_POOL_DATA", default_value = "data")]
    pub data: PathBuf,
    #[arg(long)]
    pub metric: Option<MetricMode>,
    #[arg(long)]
    pub threshold_pre: Option<f64>,
    #[arg(long)]
    pub threshold_rec: Option<f64>,
    /// Set-size range of the exhaustive run.
    #[arg(long)]
    pub set_sizes: Option<SizeRange>,
}

/// Provenance lines written at the top of every output.
#[derive(Debug, Default)]
struct Provenance {
    lines: Vec<String>,
}

impl Provenance {
    fn new(command: &str) -> Self {
        Provenance {
            lines: vec![format!("ctxpool {} {command}", env!("CARGO_PKG_VERSION"))],
        }
    }

    fn input(&mut self, path: &Path) -> CliResult<()> {
        let bytes = fs::read(path).map_err(|e| ctxpool::Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        self.lines.push(format!(
            "input {} sha256:{:x}",
            path.display(),
            Sha256::digest(&bytes)
        ));
        Ok(())
    }

    fn inputs(&mut self, paths: &[PathBuf]) -> CliResult<()> {
        paths.iter().try_for_each(|p| self.input(p))
    }

    fn config(&mut self, settings: &BTreeMap<&str, String>) {
        let joined: Vec<String> = settings.iter().map(|(k, v)| format!("{k}={v}")).collect();
        self.lines.push(format!("config {}", joined.join(" ")));
    }

    fn render(&self) -> String {
        self.lines.iter().map(|l| format!("# {l}\n")).collect()
    }
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match run(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => cfg.get::<usize>("threads")?,
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match cli.command {
        Command::Stats(a) => cmd_stats(a, out),
        Command::Train(a) => cmd_train(a, &cfg, out, err),
        Command::Query(a) => cmd_query(a, out),
        Command::Pool(a) => cmd_pool(a, &cfg, out),
        Command::Verify(a) => verify::cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, &cfg, out),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Engine(ctxpool::Error::Io {
        path: "<stdout>".into(),
        source: e,
    })
}

fn stats_line(label: &str, s: &GraphStats) -> String {
    format!(
        "{label}\t{}\t{}\t{}\n",
        s.num_relations, s.num_entities, s.num_triples
    )
}

fn cmd_stats(a: StatsArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut prov = Provenance::new("stats");
    let mut body = String::from("graph\trelations\tentities\ttriples\n");
    if let Some(split) = a.split {
        let id: SplitId = split
            .parse()
            .map_err(|e: ctxpool::Error| CliError::Usage(e.to_string()))?;
        prov.inputs(&id.train_files(&a.data))?;
        prov.inputs(&id.test_files(&a.data))?;
        let (train, test) = split_stats(&a.data, id)?;
        body.push_str(&stats_line(&format!("{id} train"), &train));
        body.push_str(&stats_line(&format!("{id} test"), &test));
    } else {
        let dir = a
            .dir
            .ok_or_else(|| CliError::Usage("give a dataset directory or --split".into()))?;
        let files: Vec<PathBuf> = SPLIT_FILES
            .iter()
            .map(|f| dir.join(f))
            .filter(|p| p.is_file())
            .collect();
        if files.is_empty() {
            return Err(CliError::Usage(format!(
                "{} contains none of {}",
                dir.display(),
                SPLIT_FILES.join(", ")
            )));
        }
        prov.inputs(&files)?;
        for f in &files {
            let (triples, vocab) = load_triple_files(std::slice::from_ref(f), None)?;
            let g = KnowledgeGraph::build(vocab, triples)?;
            let name = f.file_name().unwrap().to_string_lossy();
            body.push_str(&stats_line(&name, &g.stats()));
        }
        let (triples, vocab) = load_triple_files(&files, None)?;
        body.push_str(&stats_line(
            "all",
            &KnowledgeGraph::build(vocab, triples)?.stats(),
        ));
    }
    write!(out, "{}{body}", prov.render()).map_err(io_err)
}

fn load_graph(files: &[PathBuf], vocab: Option<&ctxpool::Vocab>) -> CliResult<KnowledgeGraph> {
    let (triples, vocab) = load_triple_files(files, vocab)?;
    Ok(KnowledgeGraph::build(vocab, triples)?)
}

fn resolve_training(flags: &TrainingFlags, cfg: &ConfigFile) -> CliResult<TrainConfig> {
    let d = TrainConfig::default();
    let algorithm = config::pick(flags.algorithm, cfg, "algorithm")?.unwrap_or(d.algorithm);
    let set_sizes = config::pick(flags.set_sizes, cfg, "set_sizes")?;
    if set_sizes.is_some() && algorithm == Algorithm::Optimized {
        return Err(CliError::Usage(
            "--set-sizes applies only to --algorithm exhaustive".into(),
        ));
    }
    let tc = TrainConfig {
        algorithm,
        metric: config::pick(flags.metric, cfg, "metric")?.unwrap_or(d.metric),
        threshold_pre: config::pick(flags.threshold_pre, cfg, "threshold_pre")?
            .unwrap_or(d.threshold_pre),
        threshold_rec: config::pick(flags.threshold_rec, cfg, "threshold_rec")?
            .unwrap_or(d.threshold_rec),
        set_sizes,
        power_set_cap: config::pick(flags.power_set_cap, cfg, "power_set_cap")?
            .unwrap_or(d.power_set_cap),
    };
    tc.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(tc)
}

fn training_settings(tc: &TrainConfig) -> BTreeMap<&'static str, String> {
    let mut m = BTreeMap::new();
    m.insert("algorithm", tc.algorithm.to_string());
    m.insert("metric", tc.metric.to_string());
    m.insert("threshold_pre", tc.threshold_pre.to_string());
    m.insert("threshold_rec", tc.threshold_rec.to_string());
    m.insert("power_set_cap", tc.power_set_cap.to_string());
    if let Some(s) = tc.set_sizes {
        m.insert("set_sizes", s.to_string());
    }
    m
}

fn cmd_train(
    a: TrainArgs,
    cfg: &ConfigFile,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let tc = resolve_training(&a.training, cfg)?;
    let g = load_graph(&a.graph, None)?;
    let cnf = Cnf::train(&g, &tc).map_err(|e| match e {
        ctxpool::Error::Capacity(m) => ctxpool::Error::Capacity(format!(
            "{m}; restrict the enumerated set sizes with --set-sizes (for example --set-sizes 4:6)"
        )),
        other => other,
    })?;
    let mut prov = Provenance::new("train");
    prov.inputs(&a.graph)?;
    prov.config(&training_settings(&tc));
    write_cnf_file(&cnf, g.vocab(), &prov.lines, &a.out)?;

    let names = g.vocab().relation_display_names();
    let mut total = 0;
    for r in g.relation_ids() {
        let n = cnf.family_size(r);
        total += n;
        let _ = writeln!(err, "family\t{}\t{n}", names[r.index()]);
    }
    writeln!(
        out,
        "wrote {} ({} relations, {total} family members)",
        a.out.display(),
        names.len()
    )
    .map_err(io_err)
}

struct Sources {
    cnf_graph: KnowledgeGraph,
    expand_graph: Option<KnowledgeGraph>,
    files: Vec<PathBuf>,
}

impl Sources {
    fn load(s: &GraphSources) -> CliResult<Sources> {
        if !s.graph.is_empty() {
            return Ok(Sources {
                cnf_graph: load_graph(&s.graph, None)?,
                expand_graph: None,
                files: s.graph.clone(),
            });
        }
        if s.cnf_graph.is_empty() {
            return Err(CliError::Usage(
                "give --graph, or both --cnf-graph and --expand-graph".into(),
            ));
        }
        let cnf_graph = load_graph(&s.cnf_graph, None)?;
        let expand_graph = load_graph(&s.expand_graph, Some(cnf_graph.vocab()))?;
        let mut files = s.cnf_graph.clone();
        files.extend(s.expand_graph.iter().cloned());
        Ok(Sources {
            cnf_graph,
            expand_graph: Some(expand_graph),
            files,
        })
    }

    fn expand(&self) -> &KnowledgeGraph {
        self.expand_graph.as_ref().unwrap_or(&self.cnf_graph)
    }
}

fn suggestions<'a>(name: &str, candidates: impl Iterator<Item = &'a str>) -> String {
    let mut scored: Vec<(f64, &str)> = candidates
        .map(|c| (strsim::normalized_levenshtein(name, c), c))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    let best: Vec<&str> = scored.iter().take(3).map(|s| s.1).collect();
    if best.is_empty() {
        String::new()
    } else {
        format!("; nearest matches: {}", best.join(", "))
    }
}

fn resolve_entity(g: &KnowledgeGraph, name: &str) -> CliResult<EntityId> {
    g.vocab().entity_id(name).ok_or_else(|| {
        let names = g.vocab().entity_names();
        CliError::Resolve(format!(
            "unknown entity `{name}`{}",
            suggestions(name, names.iter().map(String::as_str))
        ))
    })
}

fn resolve_relation(g: &KnowledgeGraph, name: &str) -> CliResult<RelationId> {
    g.vocab().relation_id(name).ok_or_else(|| {
        let names = g.vocab().relation_display_names();
        CliError::Resolve(format!(
            "unknown relation `{name}`{}",
            suggestions(name, names.iter().map(String::as_str))
        ))
    })
}

fn cmd_query(a: QueryArgs, out: &mut dyn Write) -> CliResult<()> {
    let src = Sources::load(&a.sources)?;
    let cnf = read_cnf_file(&a.cnf, src.cnf_graph.vocab())?;
    let g = src.expand();
    let h = resolve_entity(g, &a.head)?;
    let r = resolve_relation(g, &a.relation)?;

    let mut prov = Provenance::new("query");
    prov.inputs(&src.files)?;
    prov.input(&a.cnf)?;
    prov.config(&BTreeMap::from([
        ("head", a.head.clone()),
        ("relation", a.relation.clone()),
    ]));
    let mut body = String::from("relation\tprecision\trecall\n");
    match &cnf {
        Cnf::Optimized(c) => {
            let selected = c.generate(g, h, r)?;
            for s in c.entry(r).iter().filter(|s| selected.contains(s.relation)) {
                body.push_str(&format!(
                    "{}\t{}\t{}\n",
                    g.relation_name(s.relation),
                    s.precision,
                    s.recall
                ));
            }
        }
        Cnf::Exhaustive(c) => {
            if let Some((set, selected)) = c.best_match(g, h, r)? {
                let members: Vec<String> =
                    set.relations.iter().map(|x| g.relation_name(x)).collect();
                prov.lines
                    .push(format!("matched set {{{}}}", members.join(",")));
                for x in selected.iter() {
                    body.push_str(&format!(
                        "{}\t{}\t{}\n",
                        g.relation_name(x),
                        set.precision,
                        set.recall
                    ));
                }
            }
        }
    }
    write!(out, "{}{body}", prov.render()).map_err(io_err)
}

fn cmd_pool(a: PoolArgs, cfg: &ConfigFile, out: &mut dyn Write) -> CliResult<()> {
    let hops = config::pick(a.hops, cfg, "hops")?.unwrap_or(2);
    if hops == 0 {
        return Err(CliError::Usage("--hops must be at least 1".into()));
    }
    let direction = config::pick(a.direction, cfg, "direction")?.unwrap_or(Direction::Head);
    let max_layer_edges = config::pick(a.max_layer_edges, cfg, "max_layer_edges")?;

    let src = Sources::load(&a.sources)?;
    let cnf = read_cnf_file(&a.cnf, src.cnf_graph.vocab())?;
    let g = src.expand();
    let e = resolve_entity(g, &a.head)?;
    let mut r = resolve_relation(g, &a.relation)?;
    if direction == Direction::Tail {
        r = g.inverse(r);
    }
    let opts = PoolOptions { max_layer_edges };
    let cg = build_context_graph(g, &cnf, e, r, hops, &opts)?;

    let mut prov = Provenance::new("pool");
    prov.inputs(&src.files)?;
    prov.input(&a.cnf)?;
    let mut settings = BTreeMap::from([
        ("entity", a.head.clone()),
        ("relation", a.relation.clone()),
        ("hops", hops.to_string()),
        (
            "direction",
            match direction {
                Direction::Head => "head".to_string(),
                Direction::Tail => "tail".to_string(),
            },
        ),
    ]);
    if let Some(m) = max_layer_edges {
        settings.insert("max_layer_edges", m.to_string());
    }
    prov.config(&settings);
    match a.out {
        Some(path) => {
            export_context_graph(&cg, g, &prov.lines, &path)?;
            writeln!(out, "wrote {} ({} edges)", path.display(), cg.num_edges()).map_err(io_err)
        }
        None => Ok(write_context_graph(&cg, g, &prov.lines, out)?),
    }
}

fn cmd_bench(a: BenchArgs, cfg: &ConfigFile, out: &mut dyn Write) -> CliResult<()> {
    let (g, label, files) = match (&a.split, a.graph.is_empty()) {
        (Some(split), _) => {
            let id: SplitId = split
                .parse()
                .map_err(|e: ctxpool::Error| CliError::Usage(e.to_string()))?;
            let files = id.train_files(&a.data);
            (load_graph(&files, None)?, id.to_string(), files)
        }
        (None, false) => (
            load_graph(&a.graph, None)?,
            "graph".to_string(),
            a.graph.clone(),
        ),
        (None, true) => return Err(CliError::Usage("give --graph or --split".into())),
    };
    let d = TrainConfig::default();
    let metric = config::pick(a.metric, cfg, "metric")?.unwrap_or(d.metric);
    let pre = config::pick(a.threshold_pre, cfg, "threshold_pre")?.unwrap_or(d.threshold_pre);
    let rec = config::pick(a.threshold_rec, cfg, "threshold_rec")?.unwrap_or(d.threshold_rec);
    let sizes = config::pick(a.set_sizes, cfg, "set_sizes")?.unwrap_or(SizeRange::new(4, 6));
    let exhaustive = TrainConfig::exhaustive(metric, pre, rec, Some(sizes));
    let optimized = TrainConfig::optimized(metric, pre, rec);
    exhaustive
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut prov = Provenance::new("bench");
    prov.inputs(&files)?;
    let mut settings = training_settings(&exhaustive);
    settings.remove("algorithm");
    settings.remove("power_set_cap");
    prov.config(&settings);
    let run = run_bench(&g, &label, &exhaustive, &optimized)?;
    write!(out, "{}{}", prov.render(), run.report.to_text()).map_err(io_err)
}
