//! `smoothnash`: build smoothed-hard games, solve them, and run the
//! structural experiments from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "smoothnash", version, about = "Smoothed-hard bimatrix games and their equilibria")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game file and print the equilibria as JSON.
    Solve(SolveArgs),
    /// Build a reduced instance from a source game and save it.
    Reduce(ReduceArgs),
    /// Solve a saved instance and report structural quantities as JSON.
    Analyze(AnalyzeArgs),
    /// Run a probe experiment (CSV per trial plus a JSON summary).
    Probe(ProbeArgs),
    /// Exact checks of the binomial and sign-sum inequalities.
    VerifyBounds(VerifyArgs),
    /// Run or replay an experiment configuration.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Lp,
    Lh,
    SupportEnum,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// Game in the text format: "n m", then the rows of A, then the rows of B.
    #[arg(long)]
    game: PathBuf,
    /// Initial label for Lemke–Howson (0-based, rows first).
    #[arg(long, default_value_t = 0)]
    label: usize,
    /// Largest support size for enumeration; both dimensions when absent.
    #[arg(long)]
    max_support: Option<usize>,
    /// Also examine support pairs of different sizes.
    #[arg(long)]
    include_unequal: bool,
}

#[derive(Args)]
struct ReduceArgs {
    /// Source game (b×b) in the text format.
    #[arg(long)]
    source: PathBuf,
    /// Number of source strategies b.
    #[arg(long, default_value_t = 4)]
    blocks: usize,
    /// Block length ℓ.
    #[arg(long, default_value_t = 64)]
    block_len: usize,
    /// Noise family: uniform:H, rademacher:S, point:V, table:V@P,..., diff(SPEC).
    #[arg(long, default_value = "uniform:0.1")]
    noise: String,
    #[arg(long)]
    seed: u64,
    /// Treat the noise as a general distribution X and use the X − X′ form.
    #[arg(long)]
    general_x: bool,
    /// Divide the whole construction by 3.
    #[arg(long)]
    scale_third: bool,
    /// Multiplier on the source game before tensoring.
    #[arg(long, default_value_t = 1.0)]
    signal_scale: f64,
    /// Also write the gadget and noise matrices.
    #[arg(long)]
    persist_noise: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    Partition,
    Beta,
    Geometry,
    Goodness,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Instance directory written by `reduce`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    what: Analysis,
    /// Initial Lemke–Howson label.
    #[arg(long, default_value_t = 0)]
    label: usize,
    /// Partition level ratio D (default 4).
    #[arg(long)]
    d: Option<f64>,
    /// Partition level count L (default max(2, ⌈log₂ n⌉/8)).
    #[arg(long)]
    l: Option<usize>,
    /// Threshold constant for good indices.
    #[arg(long, default_value_t = 0.1)]
    c: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeKind {
    Bilinear,
    Halfspace,
    Anticoncentration,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(value_enum)]
    kind: ProbeKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Samples per trial (pairs, directions, or sign vectors).
    #[arg(long)]
    samples: Option<u64>,
    /// Dimension of the halfspace point cloud.
    #[arg(long)]
    dimension: Option<usize>,
    /// Window length of the halfspace probe.
    #[arg(long)]
    interval_len: Option<f64>,
    /// Threshold constant for anti-concentration.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory; defaults under $SMOOTHNASH_OUT or ./runs.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyArgsKind {
    /// Weighted sign sums dominate plain ones, on random instances.
    Erdos {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 14)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Binomial upper-tail lower bound for every n in range and k ≡ n (mod 2).
    BinomTail {
        #[arg(long, default_value_t = 30)]
        n_min: u64,
        #[arg(long, default_value_t = 2000)]
        n_max: u64,
    },
    /// Entropy lower bound on C(n, k) for every k ≤ n ≤ n_max.
    Entropy {
        #[arg(long, default_value_t = 2000)]
        n_max: u64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    kind: VerifyArgsKind,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Run the experiment described by a JSON configuration.
    Run {
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run a saved experiment and compare trials.csv byte for byte.
    Replay {
        dir: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Where to write the replay; DIR/replay by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
