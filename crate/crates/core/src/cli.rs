//! Command-line front end.
//!
//! Four subcommands: `solve` runs the maximum search and reports JSON,
//! `kbs` runs a fixed-size search and can emit the per-iteration
//! distributions, `gen` writes synthetic graph files, and `bench` compares
//! the simulated search against the exhaustive classical solver over a
//! directory of datasets.
//!
//! Exit codes: 0 success, 1 usage, 2 input error, 3 engine error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::bigraph::{BipartiteGraph, Objective, SizeTarget, VertexSubset};
use crate::grover::{search_fixed, search_max, MaxSearchResult, SearchError, SearchOptions};
use crate::sim::{self, Engine, EngineRun};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qmbs",
    version,
    about = "Maximum biclique search on simulated amplitude amplification"
)]
pub struct Cli {
    /// Worker threads for parallel sweeps (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find a maximum biclique and print the result as JSON.
    Solve(SolveArgs),
    /// Search for a biclique of one size and inspect the distributions.
    Kbs(KbsArgs),
    /// Generate a synthetic graph file.
    Gen(GenArgs),
    /// Compare the simulated search against the classical solver.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Graph file, or - for standard input.
    pub graph: String,
    #[arg(long, value_enum, default_value_t = Objective::Edges)]
    pub objective: Objective,
    #[arg(long, value_enum, default_value_t = Engine::Tracked)]
    pub engine: Engine,
    /// Measurement seed; fixes the output byte for byte.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Measurement attempts per probe.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeats: u32,
    /// Amplification rounds for probes with no satisfying subset.
    #[arg(long, default_value_t = 0)]
    pub fallback_iterations: usize,
    /// Write the JSON report here instead of standard output.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KbsArgs {
    /// Graph file, or - for standard input.
    pub graph: String,
    /// Objective size to search for.
    #[arg(short)]
    pub k: u32,
    /// Treat the size as a lower bound instead of an exact match.
    #[arg(long)]
    pub at_least: bool,
    #[arg(long, value_enum, default_value_t = Objective::Edges)]
    pub objective: Objective,
    #[arg(long, value_enum, default_value_t = Engine::Tracked)]
    pub engine: Engine,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples drawn per emitted distribution.
    #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeats: u32,
    #[arg(long, default_value_t = 0)]
    pub fallback_iterations: usize,
    /// Directory that receives one distribution file per snapshot,
    /// suffixed itr0..itrT.
    #[arg(long)]
    pub emit_distribution: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    pub format: FileFormat,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Left side size.
    pub left: u32,
    /// Right side size.
    pub right: u32,
    /// Edge count.
    pub edges: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory holding graph files (*.txt).
    #[arg(long)]
    pub datasets: PathBuf,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Objective::Edges)]
    pub objective: Objective,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeats: u32,
    #[arg(long, default_value_t = 0)]
    pub fallback_iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    fn extension(self) -> &'static str {
        match self {
            FileFormat::Csv => "csv",
            FileFormat::Json => "json",
        }
    }
}

/// Failure that maps onto a process exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Engine(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Engine(_) => EXIT_ENGINE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Engine(m) => f.write_str(m),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Sim(inner) => CliError::Engine(inner.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Parses arguments and runs; the returned code is ready for
/// `process::exit`.
pub fn run_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    if cli.threads > 0 {
        // A second initialization in-process is harmless; rayon keeps the
        // first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Kbs(args) => cmd_kbs(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn load_graph(source: &str) -> Result<BipartiteGraph, CliError> {
    let text = if source == "-" {
        io::read_to_string(io::stdin()).map_err(input_err)?
    } else {
        fs::read_to_string(source).map_err(|e| CliError::Input(format!("{source}: {e}")))?
    };
    BipartiteGraph::parse(&text).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

fn write_report(out: &Option<PathBuf>, json: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, format!("{json}\n"))
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

/// Side membership of a subset as 1-based vertex indices.
fn side_indices(g: &BipartiteGraph, c: VertexSubset) -> (Vec<u32>, Vec<u32>) {
    let left = (1..=g.left_count()).filter(|&i| c.contains(i - 1)).collect();
    let right = (1..=g.right_count()).filter(|&j| c.contains(g.left_count() + j - 1)).collect();
    (left, right)
}

#[derive(serde::Serialize)]
struct ProbeReport {
    target: String,
    solutions: u64,
    iterations: usize,
    attempts: u32,
    found: Option<String>,
}

#[derive(serde::Serialize)]
struct SolveReport {
    objective: Objective,
    engine: Engine,
    seed: u64,
    size: u32,
    subset: Option<String>,
    left: Vec<u32>,
    right: Vec<u32>,
    verified: bool,
    oracle_calls: u64,
    probes: Vec<ProbeReport>,
}

fn solve_report(
    g: &BipartiteGraph,
    r: &MaxSearchResult,
    engine: Engine,
    seed: u64,
) -> SolveReport {
    let (left, right) = match r.subset {
        Some(c) => side_indices(g, c),
        None => (Vec::new(), Vec::new()),
    };
    SolveReport {
        objective: r.objective,
        engine,
        seed,
        size: r.size,
        subset: r.subset.map(|c| c.label()),
        left,
        right,
        verified: r.verified,
        oracle_calls: r.probes.iter().map(|p| p.iterations as u64).sum(),
        probes: r
            .probes
            .iter()
            .map(|p| ProbeReport {
                target: p.target.to_string(),
                solutions: p.solutions,
                iterations: p.iterations,
                attempts: p.attempts,
                found: p.found.map(|c| c.label()),
            })
            .collect(),
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    let opts = SearchOptions {
        engine: args.engine,
        seed: args.seed,
        repeats: args.repeats,
        fallback_iterations: args.fallback_iterations,
    };
    let result = search_max(&g, args.objective, &opts)?;
    let report = solve_report(&g, &result, args.engine, args.seed);
    let json = serde_json::to_string_pretty(&report).expect("report serialization");
    write_report(&args.out, &json)
}

#[derive(serde::Serialize)]
struct KbsReport {
    objective: Objective,
    engine: Engine,
    seed: u64,
    target: String,
    solutions: u64,
    iterations: usize,
    attempts: u32,
    subset: Option<String>,
    left: Vec<u32>,
    right: Vec<u32>,
    shots: u64,
    emitted: Vec<String>,
}

/// Writes one distribution file per snapshot into `dir` and returns the
/// paths. Snapshot `i` is the state after `i` amplification rounds; its
/// samples draw from `seed + i` so the files are independent but fixed.
fn emit_snapshots(
    dir: &Path,
    run: &EngineRun,
    shots: u64,
    seed: u64,
    format: FileFormat,
) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for (i, dist) in run.snapshots.iter().enumerate() {
        let hist = sim::sample(dist, shots, seed.wrapping_add(i as u64));
        let path = dir.join(format!("distribution_itr{i}.{}", format.extension()));
        let file = fs::File::create(&path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let mut w = io::BufWriter::new(file);
        let io_result = match format {
            FileFormat::Csv => sim::write_distribution_csv(&mut w, dist, &hist),
            FileFormat::Json => sim::write_distribution_json(&mut w, dist, &hist, i),
        };
        io_result
            .and_then(|()| w.flush())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        paths.push(path.display().to_string());
    }
    Ok(paths)
}

fn cmd_kbs(args: &KbsArgs) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    let target = if args.at_least {
        SizeTarget::AtLeast(args.k)
    } else {
        SizeTarget::Exact(args.k)
    };
    let opts = SearchOptions {
        engine: args.engine,
        seed: args.seed,
        repeats: args.repeats,
        fallback_iterations: args.fallback_iterations,
    };
    let result = search_fixed(&g, args.objective, target, &opts)?;
    let emitted = match &args.emit_distribution {
        Some(dir) => emit_snapshots(dir, &result.run, args.shots, args.seed, args.format)?,
        None => Vec::new(),
    };
    let (left, right) = match result.subset {
        Some(c) => side_indices(&g, c),
        None => (Vec::new(), Vec::new()),
    };
    let report = KbsReport {
        objective: args.objective,
        engine: args.engine,
        seed: args.seed,
        target: target.to_string(),
        solutions: result.solutions,
        iterations: result.iterations,
        attempts: result.attempts,
        subset: result.subset.map(|c| c.label()),
        left,
        right,
        shots: args.shots,
        emitted,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialization");
    println!("{json}");
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let g = BipartiteGraph::synthetic(args.left, args.right, args.edges as usize, args.seed)
        .map_err(input_err)?;
    match &args.out {
        Some(path) => fs::write(path, g.to_text())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{}", g.to_text());
            Ok(())
        }
    }
}

#[derive(serde::Serialize)]
struct BenchEngineRow {
    engine: Engine,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_calls: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

#[derive(serde::Serialize)]
struct BenchDatasetRow {
    dataset: String,
    left: u32,
    right: u32,
    vertices: u32,
    edges: usize,
    classical_size: u32,
    classical_ms: f64,
    engines: Vec<BenchEngineRow>,
}

#[derive(serde::Serialize)]
struct BenchReport {
    objective: Objective,
    seed: u64,
    repeats: u32,
    datasets: Vec<BenchDatasetRow>,
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(&args.datasets)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.datasets.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Input(format!(
            "no .txt graph files in {}",
            args.datasets.display()
        )));
    }

    let mut rows = Vec::new();
    for path in paths {
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let g = BipartiteGraph::parse(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;

        let classical_start = Instant::now();
        let (_, classical_size) = g.brute_force_max(args.objective).map_err(input_err)?;
        let classical_ms = classical_start.elapsed().as_secs_f64() * 1e3;

        let mut engines = Vec::new();
        for engine in [Engine::Tracked, Engine::Dense] {
            let opts = SearchOptions {
                engine,
                seed: args.seed,
                repeats: args.repeats,
                fallback_iterations: args.fallback_iterations,
            };
            let start = Instant::now();
            match search_max(&g, args.objective, &opts) {
                Ok(r) => engines.push(BenchEngineRow {
                    engine,
                    skipped: None,
                    size: Some(r.size),
                    agreement: Some(r.size == classical_size),
                    verified: Some(r.verified),
                    oracle_calls: Some(r.probes.iter().map(|p| p.iterations as u64).sum()),
                    wall_ms: Some(start.elapsed().as_secs_f64() * 1e3),
                }),
                // A capacity refusal is an expected outcome for one engine,
                // not a benchmark failure.
                Err(SearchError::Sim(e)) => engines.push(BenchEngineRow {
                    engine,
                    skipped: Some(e.to_string()),
                    size: None,
                    agreement: None,
                    verified: None,
                    oracle_calls: None,
                    wall_ms: None,
                }),
                Err(other) => {
                    return Err(CliError::Input(format!("{}: {other}", path.display())));
                }
            }
        }
        rows.push(BenchDatasetRow {
            dataset: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
            left: g.left_count(),
            right: g.right_count(),
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            classical_size,
            classical_ms,
            engines,
        });
    }

    let report = BenchReport {
        objective: args.objective,
        seed: args.seed,
        repeats: args.repeats,
        datasets: rows,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialization");
    write_report(&args.out, &json)
}
