//! Single binary wiring the embedding pipelines, closed-form dumps, walk
//! simulation, spectral diagnostics, and the classification harness behind
//! subcommands with a stable exit-code taxonomy:
//! 1 usage, 2 i/o, 3 validation, 4 convergence, 5 capacity.

mod commands;
mod output;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use netmf_core::Error;

#[derive(Parser)]
#[command(name = "netmf", version, about = "Network embedding via explicit matrix factorization")]
struct Cli {
    /// Worker threads for parallel stages (0 = all cores); falls back to
    /// the NETMF_THREADS environment variable.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a network embedding (exact or rank-h approximate pipeline)
    Embed(EmbedArgs),
    /// Dump a closed-form similarity (or its shifted log) as TSV
    ClosedForm(ClosedFormArgs),
    /// Generate a walk corpus and report distances to the expected limits
    Simulate(SimulateArgs),
    /// Eigenvalues, filtered spectrum, and spectral bound tables
    Spectrum(SpectrumArgs),
    /// Multi-label classification sweep over an embedding file
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Approx,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IsolatedArg {
    Reject,
    Drop,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Line,
    Deepwalk,
    Node2vec,
    Pte,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimModelArg {
    Deepwalk,
    Node2vec,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StartArg {
    Stationary,
    Uniform,
}

#[derive(Args)]
struct EmbedArgs {
    /// Edge-list input: `src dst [weight]`, `#` comments
    #[arg(long)]
    input: std::path::PathBuf,
    /// exact: factorize the dense closed form; approx: rank-h spectral path
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Window size T
    #[arg(long, default_value_t = 10)]
    window: usize,
    /// Negative-sample count b
    #[arg(long, default_value_t = 1.0)]
    neg: f64,
    /// Embedding dimension d
    #[arg(long, default_value_t = 128)]
    dim: usize,
    /// Eigenpairs h kept by the approximate pipeline (e.g. 256)
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    output: std::path::PathBuf,
    /// Write 17 significant digits instead of 6-decimal fixed notation
    #[arg(long)]
    full_precision: bool,
    /// Suppress the timestamp header line for byte-identical reruns
    #[arg(long)]
    deterministic: bool,
    /// What to do with zero-degree vertices at load time
    #[arg(long, value_enum, default_value = "reject")]
    isolated: IsolatedArg,
    /// Vertex cap for dense n×n stages
    #[arg(long, default_value_t = netmf_core::closed_form::DEFAULT_DENSE_CAP)]
    dense_cap: usize,
}

#[derive(Args)]
struct ClosedFormArgs {
    /// Edge-list input (line / deepwalk / node2vec models)
    #[arg(long)]
    input: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value = "deepwalk")]
    model: ModelArg,
    #[arg(long, default_value_t = 10)]
    window: usize,
    #[arg(long, default_value_t = 1.0)]
    neg: f64,
    /// node2vec return parameter
    #[arg(long)]
    p: Option<f64>,
    /// node2vec in-out parameter
    #[arg(long)]
    q: Option<f64>,
    /// PTE word-word edge list
    #[arg(long)]
    ww: Option<std::path::PathBuf>,
    /// PTE document-word edge list (words shared with --ww)
    #[arg(long)]
    dw: Option<std::path::PathBuf>,
    /// PTE label-word edge list (words shared with --ww)
    #[arg(long)]
    lw: Option<std::path::PathBuf>,
    /// PTE sub-network weights; defaults balance α·vol = β·vol = γ·vol
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Dump ln(max(M, 1)) instead of the raw similarity
    #[arg(long)]
    log: bool,
    #[arg(long)]
    output: std::path::PathBuf,
    #[arg(long)]
    deterministic: bool,
    #[arg(long, value_enum, default_value = "reject")]
    isolated: IsolatedArg,
    #[arg(long, default_value_t = netmf_core::closed_form::DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    /// Cap on directed-edge states for the node2vec model
    #[arg(long, default_value_t = netmf_core::closed_form::DEFAULT_EDGE_STATE_CAP)]
    state_cap: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    input: std::path::PathBuf,
    #[arg(long, value_enum, default_value = "deepwalk")]
    model: SimModelArg,
    /// Number of walks N
    #[arg(long, default_value_t = 80)]
    walks: usize,
    /// Walk length L
    #[arg(long, default_value_t = 40)]
    length: usize,
    /// Window size T
    #[arg(long, default_value_t = 10)]
    window: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// node2vec return parameter
    #[arg(long)]
    p: Option<f64>,
    /// node2vec in-out parameter
    #[arg(long)]
    q: Option<f64>,
    /// First-vertex distribution (deepwalk model only; node2vec draws its
    /// first state from the edge-chain stationary distribution)
    #[arg(long, value_enum)]
    start: Option<StartArg>,
    /// Negative-sample count b for the PMI comparison
    #[arg(long, default_value_t = 1.0)]
    neg: f64,
    /// Report TSV: columns metric, offset r, value
    #[arg(long)]
    report: std::path::PathBuf,
    #[arg(long)]
    deterministic: bool,
    #[arg(long, value_enum, default_value = "reject")]
    isolated: IsolatedArg,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    input: std::path::PathBuf,
    /// Eigenpairs to compute (defaults to min(256, n))
    #[arg(long)]
    top: Option<usize>,
    #[arg(long, default_value_t = 10)]
    window: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also emit the three decreasing spectra (raw λ, f(λ), interior matrix)
    #[arg(long)]
    plot_data: bool,
    #[arg(long)]
    output: std::path::PathBuf,
    #[arg(long)]
    deterministic: bool,
    #[arg(long, value_enum, default_value = "reject")]
    isolated: IsolatedArg,
}

#[derive(Args)]
struct EvalArgs {
    /// Embedding file produced by `embed`
    #[arg(long)]
    embedding: std::path::PathBuf,
    /// Label file: `vertex label` per line, repeats allowed
    #[arg(long)]
    labels: std::path::PathBuf,
    /// Comma-separated training ratios in (0, 1)
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    ratios: String,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// L2 penalty strength
    #[arg(long, default_value_t = 1.0)]
    l2: f64,
    /// Optimizer gradient-norm tolerance
    #[arg(long, default_value_t = 1e-6)]
    opt_tol: f64,
    /// Report TSV: ratio, micro_mean, micro_std, macro_mean, macro_std
    #[arg(long)]
    report: std::path::PathBuf,
    #[arg(long)]
    deterministic: bool,
}

/// CLI-level failure: either a usage problem (exit 1) or a core error
/// mapped onto the exit-code taxonomy.
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Usage(_) => 1,
        CliError::Core(Error::Io(_)) => 2,
        CliError::Core(Error::Format(_)) | CliError::Core(Error::Validation(_)) => 3,
        CliError::Core(Error::Convergence(_)) => 4,
        CliError::Core(Error::Capacity(_)) => 5,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("NETMF_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");

    let result = pool.install(|| match cli.command {
        Command::Embed(args) => commands::run_embed(args),
        Command::ClosedForm(args) => commands::run_closed_form(args),
        Command::Simulate(args) => commands::run_simulate(args),
        Command::Spectrum(args) => commands::run_spectrum(args),
        Command::Eval(args) => commands::run_eval(args),
    });

    if let Err(e) = result {
        match &e {
            CliError::Usage(msg) => eprintln!("usage error: {msg}"),
            CliError::Core(err) => eprintln!("error: {err}"),
        }
        std::process::exit(exit_code(&e));
    }
}
