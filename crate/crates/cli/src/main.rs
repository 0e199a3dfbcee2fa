mod bench;
mod spanner_file;

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use spanner_core::generate::{generate, GeneratorSpec, WeightLaw};
use spanner_core::graph::{parse_graph, write_edge_list, GraphFormat};
use spanner_core::oracle::{spanner_metrics, verify_stretch};
use spanner_core::registry::AlgorithmRegistry;
use spanner_core::{BuildParams, BuildReport, WeightedGraph};

use bench::{run_bench, thread_cap, BenchGrid};
use spanner_file::{read_spanner, sha256_hex, write_spanner, Header};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Verify(_) => 1,
        }
    }
}

fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Parser)]
#[command(name = "spanner", about = "Build and check light graph spanners")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random graph as an edge list.
    Gen(GenArgs),
    /// Build a spanner and print its metrics.
    Build(BuildArgs),
    /// Check a spanner file against its source graph.
    Verify(VerifyArgs),
    /// Sweep a grid of configurations and write CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GenType {
    Gnp,
    Grid,
    Geometric,
}

#[derive(Args, Clone, Debug)]
struct GenArgs {
    #[arg(long = "type", value_enum, default_value = "gnp")]
    kind: GenType,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Edge probability for gnp; overrides --avg-degree.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 8.0)]
    avg_degree: f64,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Connection radius for geometric graphs.
    #[arg(long)]
    radius: Option<f64>,
    /// unit, uniform[:max], log-uniform[:max] or pow2[:max_exp].
    #[arg(long, default_value = "uniform")]
    law: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl GenArgs {
    fn spec(&self) -> Result<GeneratorSpec, CliError> {
        let law: WeightLaw = self.law.parse().map_err(CliError::Config)?;
        gen_spec(self.kind, self.n, self.p, self.avg_degree, self.rows, self.cols, self.radius, law)
    }
}

#[allow(clippy::too_many_arguments)]
fn gen_spec(
    kind: GenType,
    n: usize,
    p: Option<f64>,
    avg_degree: f64,
    rows: Option<usize>,
    cols: Option<usize>,
    radius: Option<f64>,
    law: WeightLaw,
) -> Result<GeneratorSpec, CliError> {
    Ok(match kind {
        GenType::Gnp => {
            let p = p.unwrap_or(if n > 1 { avg_degree / (n - 1) as f64 } else { 0.0 });
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Config(format!("edge probability {p} outside [0, 1]")));
            }
            GeneratorSpec::Gnp { n, p, law, connected: true }
        }
        GenType::Grid => {
            let side = (n as f64).sqrt().round().max(1.0) as usize;
            let rows = rows.unwrap_or(side);
            let cols = cols.unwrap_or_else(|| n.div_ceil(rows.max(1)));
            GeneratorSpec::Grid { rows, cols, law }
        }
        GenType::Geometric => {
            let radius = radius.unwrap_or_else(|| (avg_degree / (std::f64::consts::PI * n.max(1) as f64)).sqrt());
            GeneratorSpec::Geometric { n, radius }
        }
    })
}

#[derive(Args, Clone, Debug)]
struct BuildArgs {
    /// JSON run config; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(short, long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "edge-list")]
    format: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Where to write the metrics JSON; stdout when absent.
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nominal_eps: bool,
    /// Include the per-level report in the metrics.
    #[arg(long)]
    instrument: bool,
}

/// A build as a reproducible JSON document.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    algo: Option<String>,
    k: Option<usize>,
    eps: Option<f64>,
    seed: Option<u64>,
    /// Used when no input path is given.
    generator: Option<GeneratorSpec>,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    #[serde(default)]
    nominal_eps: bool,
    #[serde(default)]
    instrument: bool,
}

#[derive(Serialize)]
struct BuildMetrics {
    algo: String,
    k: usize,
    eps: f64,
    n: usize,
    m: usize,
    edges: usize,
    weight: f64,
    mst_weight: f64,
    sparsity: f64,
    lightness: f64,
    ops: u64,
    seconds: f64,
    source_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<BuildReport>,
}

#[derive(Args, Clone, Debug)]
struct VerifyArgs {
    #[arg(short, long)]
    graph: PathBuf,
    #[arg(short, long)]
    spanner: PathBuf,
    /// Stretch target; defaults to (2k-1)(1+eps) from the spanner header.
    #[arg(short, long)]
    target: Option<f64>,
    #[arg(long, default_value = "edge-list")]
    format: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "greedy,pm,linear,light")]
    algo: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "256")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long = "gen", value_enum, default_value = "gnp")]
    kind: GenType,
    #[arg(long, default_value_t = 8.0)]
    avg_degree: f64,
    #[arg(long, default_value = "uniform")]
    law: String,
    #[arg(long)]
    nominal_eps: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::Gen(a) => cmd_gen(&a),
        Command::Build(a) => cmd_build(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spanner: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            fs::File::create(p).map_err(|e| config(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    let g = generate(&a.spec()?, a.seed).map_err(config)?;
    let mut out = sink(a.output.as_deref())?;
    write_edge_list(&mut out, &g).and_then(|_| out.flush()).map_err(config)
}

fn read_graph(path: &Path, format: GraphFormat) -> Result<(WeightedGraph, Vec<u8>), CliError> {
    let bytes = fs::read(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    let (g, _) = parse_graph(bytes.as_slice(), format).map_err(|e| config(format!("{}: {e}", path.display())))?;
    Ok((g, bytes))
}

fn cmd_build(a: &BuildArgs) -> Result<(), CliError> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| config(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| config(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    cfg.algo = a.algo.clone().or(cfg.algo);
    cfg.k = a.k.or(cfg.k);
    cfg.eps = a.eps.or(cfg.eps);
    cfg.seed = a.seed.or(cfg.seed);
    cfg.input = a.input.clone().or(cfg.input);
    cfg.output = a.output.clone().or(cfg.output);
    cfg.nominal_eps |= a.nominal_eps;
    cfg.instrument |= a.instrument;

    let algo = cfg.algo.clone().ok_or_else(|| config("--algo is required"))?;
    let params = BuildParams {
        k: cfg.k.ok_or_else(|| config("--k is required"))?,
        eps: cfg.eps.ok_or_else(|| config("--eps is required"))?,
        nominal_eps: cfg.nominal_eps,
        instrument: cfg.instrument,
        check: false,
    };
    params.validate().map_err(config)?;
    let registry = AlgorithmRegistry::with_defaults();
    registry.get(&algo).map_err(config)?;

    let (g, bytes) = match (&cfg.input, &cfg.generator) {
        (Some(p), _) => read_graph(p, a.format.parse().map_err(CliError::Config)?)?,
        (None, Some(spec)) => {
            let g = generate(spec, cfg.seed.unwrap_or(0)).map_err(config)?;
            let mut bytes = Vec::new();
            write_edge_list(&mut bytes, &g).map_err(config)?;
            (g, bytes)
        }
        (None, None) => return Err(config("either --input or a generator in --config is required")),
    };

    let start = Instant::now();
    let s = registry.build(&algo, &g, &params).map_err(config)?;
    let seconds = start.elapsed().as_secs_f64();
    let h = s.to_graph(&g);
    let q = spanner_metrics(&g, &h);
    let header = Header { algo: algo.clone(), k: params.k, eps: params.eps, n: g.n(), source_hash: sha256_hex(&bytes) };
    if let Some(p) = &cfg.output {
        let mut out = sink(Some(p))?;
        write_spanner(&mut out, &header, &h).and_then(|_| out.flush()).map_err(config)?;
    }
    let metrics = BuildMetrics {
        algo,
        k: params.k,
        eps: params.eps,
        n: g.n(),
        m: g.m(),
        edges: q.edges,
        weight: q.weight,
        mst_weight: q.mst_weight,
        sparsity: q.sparsity,
        lightness: q.lightness,
        ops: s.ops,
        seconds,
        source_hash: header.source_hash,
        report: if params.instrument { s.report } else { None },
    };
    let mut out = sink(a.metrics.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &metrics).map_err(config)?;
    writeln!(out).and_then(|_| out.flush()).map_err(config)
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let (g, bytes) = read_graph(&a.graph, a.format.parse().map_err(CliError::Config)?)?;
    let file = fs::File::open(&a.spanner).map_err(|e| config(format!("{}: {e}", a.spanner.display())))?;
    let (header, h) = read_spanner(BufReader::new(file))?;
    if header.source_hash != sha256_hex(&bytes) {
        return Err(config(format!(
            "{} was built from a different graph than {}",
            a.spanner.display(),
            a.graph.display()
        )));
    }
    let t = a.target.unwrap_or_else(|| BuildParams::new(header.k, header.eps).target_stretch());
    let report = verify_stretch(&g, &h, t).map_err(|e| CliError::Verify(e.to_string()))?;
    let mut out = sink(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(config)?;
    writeln!(out).and_then(|_| out.flush()).map_err(config)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verify(format!("max stretch {} exceeds {t}", report.max_stretch)))
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let law: WeightLaw = a.law.parse().map_err(CliError::Config)?;
    let (kind, avg_degree) = (a.kind, a.avg_degree);
    for &k in &a.k {
        for &eps in &a.eps {
            BuildParams::new(k, eps).validate().map_err(config)?;
        }
    }
    let grid = BenchGrid {
        algos: a.algo.clone(),
        ns: a.n.clone(),
        ks: a.k.clone(),
        eps: a.eps.clone(),
        seeds: (0..a.seeds).collect(),
        nominal_eps: a.nominal_eps,
        instance: Box::new(move |n| {
            gen_spec(kind, n, None, avg_degree, None, None, None, law).expect("bench generator spec")
        }),
    };
    for &n in &a.n {
        gen_spec(kind, n, None, avg_degree, None, None, None, law)?;
    }
    let rows = run_bench(&grid, &AlgorithmRegistry::with_defaults(), thread_cap())?;
    let mut w = csv::Writer::from_writer(sink(a.output.as_deref())?);
    for r in &rows {
        w.serialize(r).map_err(config)?;
    }
    w.flush().map_err(config)
}
