//! `orthoprime` command-line interface.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid usage or input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::Failure;
use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "orthoprime", version, about = "Masked form-priming stimuli, match values and rank statistics")]
struct Cli {
    /// Flat key = value run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed; required by every generative command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Target word list, one per line (defaults to the bundled 420-word stand-in).
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Accept any letter strings instead of 420 six-letter words without repeats.
    #[arg(long, global = true)]
    free_lexicon: bool,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Disable the data-parallel path.
    #[arg(long, global = true)]
    sequential: bool,
    /// Increase log verbosity (stderr).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the full prime set as CSV.
    GenPrimes,
    /// Condition-level match values for the coding schemes.
    Match(MatchArgs),
    /// Render augmented training images and a manifest.
    RenderTrain(RenderTrainArgs),
    /// Render canonical prime and target images and a manifest.
    RenderPrimes,
    /// Rank correlations of similarity metrics against human priming.
    Analyze(AnalyzeArgs),
    /// Validate activation files and their coverage of the stimulus set.
    IngestCheck(IngestCheckArgs),
}

#[derive(Args, Debug)]
struct MatchArgs {
    /// Comma-separated schemes (absolute, spatial, binary_ob, overlap_ob, seriol_ob).
    #[arg(long)]
    schemes: Option<String>,
    /// Scheme parameter file (TOML); defaults to the shipped calibration.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Score explicit PRIME:TARGET pairs instead of the 28 conditions.
    #[arg(long = "pair", value_name = "PRIME:TARGET")]
    pairs: Vec<String>,
}

#[derive(Args, Debug)]
struct RenderTrainArgs {
    /// Images per word.
    #[arg(long)]
    per_word: Option<u64>,
    /// Also shift whole words, not just letters.
    #[arg(long)]
    word_shift: bool,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Include every bundled reference column.
    #[arg(long)]
    fixtures: bool,
    /// Activation files (OACT1), one metric per file.
    #[arg(long)]
    activations: Vec<PathBuf>,
    /// Include the pixel-cosine baseline (renders the prime set).
    #[arg(long)]
    pixels: bool,
    /// Letter similarity ratings CSV for the substitution analysis.
    #[arg(long)]
    ratings: Option<PathBuf>,
    /// Bootstrap resamples for standard errors (0 disables).
    #[arg(long)]
    bootstrap: Option<u64>,
}

#[derive(Args, Debug)]
struct IngestCheckArgs {
    #[arg(long, required = true)]
    activations: Vec<PathBuf>,
    /// Fail unless every target has all 28 prime vectors.
    #[arg(long)]
    strict: bool,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    let ctx = commands::Context::new(&cli, &cfg).map_err(Failure::Usage)?;
    match cli.command {
        Command::GenPrimes => commands::gen_primes(&ctx),
        Command::Match(a) => commands::match_values(&ctx, &cfg, a),
        Command::RenderTrain(a) => commands::render_train(&ctx, &cfg, a),
        Command::RenderPrimes => commands::render_primes(&ctx),
        Command::Analyze(a) => commands::analyze(&ctx, &cfg, a),
        Command::IngestCheck(a) => commands::ingest_check(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            log::error!("{}", f.error());
            ExitCode::from(f.code())
        }
    }
}
