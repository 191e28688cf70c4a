use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use phsify::catalog_file::load_presets;
use phsify::dot::emit_dot;
use phsify::json::{emit_json, load_json};
use phsify::truth::truth_value;
use phsify::{analyze_source, explain};
use phsify_core::decomposer::Ansatz;
use phsify_core::generator::{synth, SynthSpec, Topology};
use phsify_core::graph::{dot_mode_from_name, verify, AnalyzeConfig, AnalyzeError, Pin, VerifyError};
use phsify_core::odedsl::render_system;
use phsify_core::Rational;

#[derive(Parser)]
#[command(name = "phsify", version, about = "Recover port-Hamiltonian structure from polynomial ODE systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition and decorate a system, writing the graph as JSON.
    Analyze(AnalyzeArgs),
    /// Write a random system with known structure.
    Generate(GenerateArgs),
    /// Check that a graph reproduces the system's right-hand sides exactly.
    Verify { source: PathBuf, graph: PathBuf },
}

#[derive(Args)]
struct AnalyzeArgs {
    source: PathBuf,
    /// JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Largest node size.
    #[arg(long)]
    max_node: Option<usize>,
    /// Hamiltonian ansatz degree; derived per candidate when absent.
    #[arg(long)]
    max_degree: Option<u32>,
    #[arg(long, default_value = "aux")]
    dot_mode: String,
    /// Penalty per node, as a rational.
    #[arg(long)]
    lambda: Option<String>,
    /// Bonus for even-dimensional nodes, as a rational.
    #[arg(long)]
    even_bonus: Option<String>,
    /// Comma-separated template Hamiltonians: linear, weighted, quadratic.
    #[arg(long)]
    ansatz: Option<String>,
    /// JSON file of extra Poisson structures.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Print per-candidate fit diagnostics to stderr.
    #[arg(long)]
    explain: bool,
    /// Print the incidence matrix to stderr.
    #[arg(long)]
    incidence: bool,
    /// Keep a term out of the Hamiltonian fit, as `var:monomial`.
    #[arg(long = "pin", value_name = "VAR:MONOMIAL")]
    pins: Vec<String>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    nodes: Option<usize>,
    /// Node dimensions, comma-separated; a single value is repeated for every node.
    #[arg(long, default_value = "2")]
    dims: String,
    /// chain, ring or random:P
    #[arg(long, default_value = "chain")]
    topology: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    coupling_degree: u32,
    #[arg(long)]
    no_dissipation: bool,
    #[arg(long)]
    no_so3: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure { code, error: error.into() }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn rational(flag: &str, s: &str) -> anyhow::Result<Rational> {
    s.trim().parse().map_err(|_| anyhow!("--{}: `{}` is not a rational number", flag, s))
}

fn config(a: &AnalyzeArgs) -> anyhow::Result<AnalyzeConfig> {
    let mut cfg = AnalyzeConfig::default();
    cfg.dot_mode = dot_mode_from_name(&a.dot_mode).ok_or_else(|| anyhow!("--dot-mode must be aux or substitute"))?;
    if let Some(k) = a.max_node {
        if k == 0 {
            bail!("--max-node must be positive");
        }
        cfg.partition.max_block = k;
    }
    if let Some(s) = &a.lambda {
        cfg.partition.lambda = rational("lambda", s)?;
    }
    if let Some(s) = &a.even_bonus {
        cfg.partition.even_bonus = rational("even-bonus", s)?;
    }
    cfg.decompose.max_degree = a.max_degree;
    if let Some(list) = &a.ansatz {
        cfg.decompose.ansatz = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| Ansatz::from_name(s.trim()).ok_or_else(|| anyhow!("unknown ansatz `{}`", s.trim())))
            .collect::<anyhow::Result<_>>()?;
    }
    if let Some(path) = &a.catalog {
        cfg.decompose.catalog.presets = load_presets(&read(path)?).with_context(|| format!("catalog {}", path.display()))?;
    }
    cfg.pins = a
        .pins
        .iter()
        .map(|p| {
            let (eq, term) = p.split_once(':').ok_or_else(|| anyhow!("--pin expects var:monomial, got `{}`", p))?;
            Ok(Pin { equation: eq.trim().into(), term: term.trim().into() })
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(cfg)
}

fn run_analyze(a: &AnalyzeArgs) -> Result<(), Failure> {
    let cfg = config(a)?;
    let source = read(&a.source)?;
    let analysis = analyze_source(&source, &cfg).map_err(|e| match e {
        AnalyzeError::Parse(_) | AnalyzeError::Resolve(_) => fail(2, e),
        e => fail(1, e),
    })?;
    if a.incidence {
        eprint!("{}", analysis.prepared.dependency.incidence_text());
    }
    if a.explain {
        eprint!("{}", explain(&analysis));
    }
    write_or_print(a.out.as_deref(), &emit_json(&analysis.graph))?;
    if let Some(p) = &a.dot {
        fs::write(p, emit_dot(&analysis.graph)).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn topology(s: &str) -> anyhow::Result<Topology> {
    match s {
        "chain" => Ok(Topology::Chain),
        "ring" => Ok(Topology::Ring),
        _ => {
            let p = s.strip_prefix("random:").ok_or_else(|| anyhow!("--topology must be chain, ring or random:P"))?;
            let p: f64 = p.parse().map_err(|_| anyhow!("bad probability `{}`", p))?;
            if !(0.0..=1.0).contains(&p) {
                bail!("probability {} is outside [0, 1]", p);
            }
            Ok(Topology::Random(p))
        }
    }
}

fn run_generate(g: &GenerateArgs) -> Result<(), Failure> {
    let mut dims: Vec<usize> = g
        .dims
        .split(',')
        .map(|d| d.trim().parse().map_err(|_| anyhow!("bad dimension `{}`", d.trim())))
        .collect::<anyhow::Result<_>>()?;
    match (g.nodes, dims.len()) {
        (Some(n), 1) => dims = vec![dims[0]; n],
        (Some(n), k) if n != k => return Err(anyhow!("--nodes {} but {} dimensions given", n, k).into()),
        _ => {}
    }
    let spec = SynthSpec {
        dims,
        topology: topology(&g.topology)?,
        coupling_degree: g.coupling_degree,
        dissipation: !g.no_dissipation,
        so3: !g.no_so3,
        seed: g.seed,
    };
    let (sys, truth) = synth(&spec).map_err(|e| fail(1, e))?;
    write_or_print(g.out.as_deref(), &render_system(&sys))?;
    if let Some(p) = &g.truth {
        let mut text = serde_json::to_string_pretty(&truth_value(&sys, &truth)).expect("JSON values always serialize");
        text.push('\n');
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run_verify(source: &Path, graph: &Path) -> Result<(), Failure> {
    let src = read(source)?;
    let g = load_json(&read(graph)?).with_context(|| format!("loading {}", graph.display()))?;
    let report = verify(&src, &g).map_err(|e| match e {
        VerifyError::Parse(_) => fail(2, e),
        e => fail(3, e),
    })?;
    println!("symbolic_identity: {}", report.symbolic_identity);
    println!("sampled_points_checked: {}", report.sampled_points_checked);
    println!("max_abs_discrepancy: {}", report.max_abs_discrepancy);
    for v in &report.violations {
        println!("violation: {}", v);
    }
    if report.symbolic_identity && report.violations.is_empty() {
        Ok(())
    } else {
        Err(fail(3, anyhow!("reconstruction differs from the source")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Generate(g) => run_generate(g),
        Command::Verify { source, graph } => run_verify(source, graph),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
