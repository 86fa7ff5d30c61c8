use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mbfkit::algebra::{DistanceMap, NodeId, StateVector};
use mbfkit::apps::{self, Cable, Demand};
use mbfkit::engine::{instances, mbf_run};
use mbfkit::frt::{self, EmbeddingConfig, EmbeddingContext, LeList};
use mbfkit::graph::{load_graph, AdjacencyOperator, WeightedGraph};
use mbfkit::hopset::HopsetStrategy;
use mbfkit::simgraph::DEFAULT_CAP_CONST;
use mbfkit::{rng, MbfError};

/// Sample FRT tree embeddings and run MBF-like graph algorithms.
#[derive(Debug, Parser)]
#[command(name = "mbfkit", version)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "MBFKIT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample FRT trees; writes tree TSV, LE-list JSONL and optional stats.
    Embed {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Add a stretch report.
        #[arg(long)]
        stats: bool,
    },
    /// All-pairs distances of the simulated graph.
    Metric {
        #[command(flatten)]
        common: Common,
    },
    /// LE lists as JSON lines.
    Lelists {
        #[command(flatten)]
        common: Common,
    },
    /// k-median facilities.
    Kmedian {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Buy-at-bulk network design.
    Bab {
        #[command(flatten)]
        common: Common,
        /// Lines of `s t amount`.
        #[arg(long)]
        demands: PathBuf,
        /// Lines of `capacity cost`; line order gives the cable index.
        #[arg(long)]
        cables: PathBuf,
    },
    /// Run one of the basic instances directly on the input graph.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        source: Option<NodeId>,
        /// Comma-separated source set for mssp and mswp.
        #[arg(long, value_delimiter = ',')]
        sources: Vec<NodeId>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Hop limit (required for connectivity).
        #[arg(long, alias = "h")]
        hops: Option<usize>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Edge list: `n m` then `u v w` lines; `.gz` is decompressed.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Level stretch ε̂ (defaults to a power of two near 1/log² n).
    #[arg(long)]
    eps_hat: Option<f64>,
    #[arg(long, value_enum, default_value_t = HopsetArg::Identity)]
    hopset: HopsetArg,
    /// Hop budget of the hop set.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CAP_CONST)]
    cap_const: usize,
    /// Output file (a directory for `embed`); stdout if absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format (`embed` defaults to tsv, everything else to json).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn config(&self) -> EmbeddingConfig {
        EmbeddingConfig {
            seed: self.seed,
            eps_hat: self.eps_hat,
            hopset: match self.hopset {
                HopsetArg::Identity => HopsetStrategy::Identity,
                HopsetArg::Shortcut => HopsetStrategy::ClusterShortcut,
            },
            d: self.d,
            cap_const: self.cap_const,
        }
    }

    fn graph(&self) -> Result<WeightedGraph, CliError> {
        Ok(load_graph(&self.input, None)?)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HopsetArg {
    Identity,
    Shortcut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algo {
    Apsp,
    Sssp,
    Kssp,
    Mssp,
    Widest,
    Apwp,
    Mswp,
    Ksdp,
    Kdsdp,
    Connectivity,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(MbfError),
}

impl From<MbfError> for CliError {
    fn from(e: MbfError) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(e) => match e {
                MbfError::NonConvergence { .. } => 3,
                MbfError::MalformedList { .. }
                | MbfError::MissingTrace(_)
                | MbfError::NotHierarchical(_) => 2,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Lib(MbfError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| io_error(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable output");
    s.push('\n');
    s
}

fn require_json(format: Format, what: &str) -> Result<(), CliError> {
    if format == Format::Tsv {
        return Err(CliError::Usage(format!(
            "{what} only supports --format json"
        )));
    }
    Ok(())
}

fn lelists_jsonl(lists: &[LeList]) -> String {
    let mut s = String::new();
    for l in lists {
        s.push_str(&l.to_json_line());
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct TreeRow {
    id: usize,
    parent: Option<usize>,
    weight: f64,
    leaf: Option<NodeId>,
}

fn tree_text(t: &frt::FrtTree, format: Format) -> String {
    match format {
        Format::Tsv => t.to_tsv(),
        Format::Json => {
            let rows: Vec<TreeRow> = t
                .nodes
                .iter()
                .enumerate()
                .map(|(id, x)| TreeRow {
                    id,
                    parent: x.parent,
                    weight: x.weight,
                    leaf: x.leaf,
                })
                .collect();
            json(&rows)
        }
    }
}

#[derive(Serialize)]
struct EmbedStats {
    samples: usize,
    pairs: usize,
    max_mean_ratio: f64,
    mean_ratio: f64,
    domination_violations: usize,
    /// Pairs with mean stretch at most `16·ln n`.
    fraction_within_16_ln_n: f64,
    mean_le_list_length: f64,
    max_le_list_length: usize,
}

fn cmd_embed(common: &Common, samples: u64, stats: bool) -> Result<(), CliError> {
    let g = common.graph()?;
    let mut trees = Vec::new();
    let mut all_lists = Vec::new();
    for i in 0..samples {
        let cfg = common
            .config()
            .with_seed(rng::derive_seed(common.seed, "sample", i));
        let (tree, lists) = frt::sample_tree(&g, &cfg)?;
        trees.push(tree);
        all_lists.push(lists);
    }
    let stats_text = if stats {
        let report = frt::stretch_report(&g, &trees)?;
        let lengths: Vec<usize> = all_lists.iter().flatten().map(|l| l.len()).collect();
        let s = EmbedStats {
            samples: report.samples,
            pairs: report.pairs,
            max_mean_ratio: report.max_mean_ratio,
            mean_ratio: report.mean_ratio,
            domination_violations: report.domination_violations,
            fraction_within_16_ln_n: report.fraction_within(16.0 * (g.n() as f64).ln()),
            mean_le_list_length: lengths.iter().sum::<usize>() as f64 / lengths.len().max(1) as f64,
            max_le_list_length: lengths.iter().copied().max().unwrap_or(0),
        };
        Some(json(&s))
    } else {
        None
    };
    let format = common.format_or(Format::Tsv);
    let ext = match format {
        Format::Tsv => "tsv",
        Format::Json => "json",
    };
    match &common.output {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            for (i, (t, lists)) in trees.iter().zip(&all_lists).enumerate() {
                let p = dir.join(format!("tree_{i}.{ext}"));
                emit(Some(&p), &tree_text(t, format))?;
                let p = dir.join(format!("lelists_{i}.jsonl"));
                emit(Some(&p), &lelists_jsonl(lists))?;
            }
            if let Some(s) = stats_text {
                emit(Some(&dir.join("stats.json")), &s)?;
            }
        }
        None => {
            let mut out = String::new();
            for (i, t) in trees.iter().enumerate() {
                if samples > 1 {
                    writeln!(out, "# tree {i}").expect("write to string");
                }
                out.push_str(&tree_text(t, format));
            }
            if let Some(s) = stats_text {
                out.push_str(&s);
            }
            emit(None, &out)?;
        }
    }
    Ok(())
}

fn cmd_metric(common: &Common) -> Result<(), CliError> {
    let g = common.graph()?;
    let m = apps::approx_metric(&g, &common.config())?;
    let text = match common.format_or(Format::Json) {
        Format::Json => json(&m),
        Format::Tsv => {
            let mut s = String::new();
            for row in &m.dist {
                let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
                writeln!(s, "{}", cells.join("\t")).expect("write to string");
            }
            s
        }
    };
    emit(common.output.as_deref(), &text)
}

fn cmd_lelists(common: &Common) -> Result<(), CliError> {
    require_json(common.format_or(Format::Json), "lelists")?;
    let g = common.graph()?;
    let ctx = EmbeddingContext::new(&g, &common.config())?;
    let lists = ctx.le_lists(None)?;
    emit(common.output.as_deref(), &lelists_jsonl(&lists))
}

fn cmd_kmedian(common: &Common, k: usize) -> Result<(), CliError> {
    require_json(common.format_or(Format::Json), "kmedian")?;
    let g = common.graph()?;
    let s = apps::kmedian(&g, k, &common.config())?;
    emit(common.output.as_deref(), &json(&s))
}

fn read_rows(path: &Path, width: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| {
            CliError::Lib(MbfError::Parse {
                line: i + 1,
                message,
            })
        };
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| parse_err(format!("cannot parse number from {t:?}")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != width {
            return Err(parse_err(format!(
                "expected {width} fields, found {}",
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn as_node(x: f64) -> Result<NodeId, CliError> {
    if x >= 0.0 && x.fract() == 0.0 && x < usize::MAX as f64 {
        Ok(x as NodeId)
    } else {
        Err(CliError::Usage(format!("{x} is not a node id")))
    }
}

fn cmd_bab(common: &Common, demands: &Path, cables: &Path) -> Result<(), CliError> {
    require_json(common.format_or(Format::Json), "bab")?;
    let g = common.graph()?;
    let demands: Vec<Demand> = read_rows(demands, 3)?
        .into_iter()
        .map(|r| {
            Ok(Demand {
                s: as_node(r[0])?,
                t: as_node(r[1])?,
                amount: r[2],
            })
        })
        .collect::<Result<_, CliError>>()?;
    let cables: Vec<Cable> = read_rows(cables, 2)?
        .into_iter()
        .map(|r| Cable {
            capacity: r[0],
            cost: r[1],
        })
        .collect();
    let s = apps::buy_at_bulk(&g, &demands, &cables, &common.config())?;
    emit(common.output.as_deref(), &json(&s))
}

#[derive(Serialize)]
struct SolveOutput<R: Serialize> {
    algo: &'static str,
    iterations: usize,
    rows: Vec<R>,
}

#[derive(Serialize)]
struct PathRow {
    weight: f64,
    path: Vec<NodeId>,
}

fn need_source(source: Option<NodeId>, algo: &str) -> Result<NodeId, CliError> {
    source.ok_or_else(|| CliError::Usage(format!("--source is required for {algo}")))
}

fn pair_output(
    common: &Common,
    algo: &'static str,
    iterations: usize,
    rows: Vec<Vec<(NodeId, f64)>>,
) -> Result<(), CliError> {
    let text = match common.format_or(Format::Json) {
        Format::Json => json(&SolveOutput {
            algo,
            iterations,
            rows,
        }),
        Format::Tsv => {
            let mut s = String::from("node\tother\tvalue\n");
            for (v, row) in rows.iter().enumerate() {
                for (w, d) in row {
                    writeln!(s, "{v}\t{w}\t{d}").expect("write to string");
                }
            }
            s
        }
    };
    emit(common.output.as_deref(), &text)
}

fn distance_rows(state: &StateVector<DistanceMap>) -> Vec<Vec<(NodeId, f64)>> {
    state.iter().map(|x| x.entries().to_vec()).collect()
}

fn cmd_solve(
    common: &Common,
    algo: Algo,
    source: Option<NodeId>,
    sources: &[NodeId],
    k: usize,
    hops: Option<usize>,
) -> Result<(), CliError> {
    let g = common.graph()?;
    let n = g.n();
    let a = AdjacencyOperator::new(&g);
    match algo {
        Algo::Apsp | Algo::Sssp | Algo::Kssp | Algo::Mssp => {
            let (name, alg) = match algo {
                Algo::Apsp => ("apsp", instances::apsp(n)),
                Algo::Sssp => ("sssp", instances::sssp(n, need_source(source, "sssp")?)?),
                Algo::Kssp => ("kssp", instances::kssp(n, k)?),
                _ => ("mssp", instances::mssp(n, sources)?),
            };
            let out = mbf_run(&alg.with_hops(hops), a)?;
            pair_output(common, name, out.iterations, distance_rows(&out.state))
        }
        Algo::Widest | Algo::Apwp | Algo::Mswp => {
            let (name, alg) = match algo {
                Algo::Widest => (
                    "widest",
                    instances::sswp(n, need_source(source, "widest")?)?,
                ),
                Algo::Apwp => ("apwp", instances::apwp(n)),
                _ => ("mswp", instances::mswp(n, sources)?),
            };
            let out = mbf_run(&alg.with_hops(hops), a)?;
            let rows = out.state.iter().map(|x| x.entries().to_vec()).collect();
            pair_output(common, name, out.iterations, rows)
        }
        Algo::Ksdp | Algo::Kdsdp => {
            let distinct = matches!(algo, Algo::Kdsdp);
            let name = if distinct { "kdsdp" } else { "ksdp" };
            let alg = instances::ksdp(n, need_source(source, name)?, k, distinct, hops)?;
            let out = mbf_run(&alg, a)?;
            let rows: Vec<Vec<PathRow>> = out
                .state
                .iter()
                .map(|x| {
                    let mut r: Vec<PathRow> = x
                        .iter()
                        .map(|(p, w)| PathRow {
                            weight: w,
                            path: p.clone(),
                        })
                        .collect();
                    r.sort_by(|a, b| {
                        a.weight
                            .total_cmp(&b.weight)
                            .then_with(|| a.path.cmp(&b.path))
                    });
                    r
                })
                .collect();
            let text = match common.format_or(Format::Json) {
                Format::Json => json(&SolveOutput {
                    algo: name,
                    iterations: out.iterations,
                    rows,
                }),
                Format::Tsv => {
                    let mut s = String::from("node\tweight\tpath\n");
                    for (v, row) in rows.iter().enumerate() {
                        for r in row {
                            let p: Vec<String> = r.path.iter().map(|x| x.to_string()).collect();
                            writeln!(s, "{v}\t{}\t{}", r.weight, p.join(","))
                                .expect("write to string");
                        }
                    }
                    s
                }
            };
            emit(common.output.as_deref(), &text)
        }
        Algo::Connectivity => {
            let h =
                hops.ok_or_else(|| CliError::Usage("--hops is required for connectivity".into()))?;
            let out = mbf_run(&instances::connectivity(n, h), a)?;
            let rows: Vec<Vec<NodeId>> = out.state.iter().map(|x| x.nodes().to_vec()).collect();
            let text = match common.format_or(Format::Json) {
                Format::Json => json(&SolveOutput {
                    algo: "connectivity",
                    iterations: out.iterations,
                    rows,
                }),
                Format::Tsv => {
                    let mut s = String::from("node\tother\n");
                    for (v, row) in rows.iter().enumerate() {
                        for w in row {
                            writeln!(s, "{v}\t{w}").expect("write to string");
                        }
                    }
                    s
                }
            };
            emit(common.output.as_deref(), &text)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Embed {
            common,
            samples,
            stats,
        } => cmd_embed(common, *samples, *stats),
        Command::Metric { common } => cmd_metric(common),
        Command::Lelists { common } => cmd_lelists(common),
        Command::Kmedian { common, k } => cmd_kmedian(common, *k as usize),
        Command::Bab {
            common,
            demands,
            cables,
        } => cmd_bab(common, demands, cables),
        Command::Solve {
            common,
            algo,
            source,
            sources,
            k,
            hops,
        } => cmd_solve(common, *algo, *source, sources, *k, *hops),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
