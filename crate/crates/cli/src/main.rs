use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod error;
mod output;

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "wordent",
    version,
    about = "Word entropy estimation for text corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Block and source entropy of each text.
    Entropy(EntropyArgs),
    /// Entropy trajectories over growing prefixes and their convergence points.
    Converge(ConvergeArgs),
    /// Correlation and least-squares fit of block vs source entropy.
    Analyze(AnalyzeArgs),
    /// Pairwise source-entropy ratios, optionally correlated with BLEU scores.
    Ratios(RatiosArgs),
    /// Write a seeded synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorChoice {
    Ml,
    Nsb,
    Source,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

/// Options shared by the corpus-processing commands. Every option can also
/// be set in the `--config` file; flags win.
#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Files or directories of plain or tab-separated verse text.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorChoice>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Apply Unicode NFC normalization before tokenizing.
    #[arg(long)]
    pub nfc: bool,
    /// Allow a match to overlap the position it predicts.
    #[arg(long)]
    pub overlap: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Omit the timestamp so identical inputs give identical output.
    #[arg(long)]
    pub deterministic: bool,
    /// key=value file with defaults for the options above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Texts with fewer tokens are skipped.
    #[arg(long)]
    pub min_tokens: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub step: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// An `entropy` report, or a TSV with columns label, x, y.
    pub input: PathBuf,
    /// Comma-separated labels to leave out.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,
    /// Report column used as x.
    #[arg(long, default_value = "block_nsb")]
    pub x: String,
    /// Report column used as y.
    #[arg(long, default_value = "source")]
    pub y: String,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct RatiosArgs {
    /// An `entropy` report, or a TSV with columns label, value.
    pub input: PathBuf,
    /// Report column holding the entropies.
    #[arg(long, default_value = "source")]
    pub column: String,
    /// TSV with columns src_label, tgt_label, bleu.
    #[arg(long)]
    pub bleu: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub kind: word_entropy::SourceKind,
    /// Number of types (states).
    #[arg(long, default_value_t = 1000)]
    pub v: usize,
    /// Zipf exponent.
    #[arg(long, default_value_t = 1.0)]
    pub exp: f64,
    /// Zipf-Mandelbrot shift.
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    /// Gamma shape of the Markov transition rows.
    #[arg(long, default_value_t = word_entropy::synthgen::DEFAULT_CONCENTRATION)]
    pub concentration: f64,
    /// Number of tokens.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Entropy(args) => commands::entropy::run(args),
        Command::Converge(args) => commands::converge::run(args),
        Command::Analyze(args) => commands::analyze::run(args),
        Command::Ratios(args) => commands::ratios::run(args),
        Command::Synth(args) => commands::synth::run(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("wordent: {err}");
            ExitCode::from(err.code())
        }
    }
}
