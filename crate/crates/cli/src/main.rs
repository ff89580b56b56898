//! Command-line entry point for the summarization pipeline: corpus
//! statistics, entity-extractor training and evaluation, pseudo-labeling,
//! summarizer training, PPO fine-tuning, generation, and scoring.

mod commands;
mod config;
mod manifest;
mod util;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use crate::config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(
    name = "polsum",
    version,
    about = "Entity-aware summarization of privacy-policy documents"
)]
struct Cli {
    /// TOML configuration file; every omitted value keeps its default.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Random seed, overriding the config; recorded in every run manifest.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory artifacts and manifests are written into, overriding the
    /// config (default `runs`).
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summary statistics of an annotated corpus.
    Stats(commands::stats::StatsArgs),
    /// Train the span-based entity extractor.
    TrainEepd(commands::train_eepd::TrainEepdArgs),
    /// Evaluate an extractor checkpoint against gold spans.
    EvalEepd(commands::eval_eepd::EvalEepdArgs),
    /// Annotate a corpus with extractor predictions.
    PseudoLabel(commands::pseudo_label::PseudoLabelArgs),
    /// Train the encoder-decoder summarizer.
    TrainSummarizer(commands::train_summarizer::TrainSummarizerArgs),
    /// Fine-tune a trained summarizer with PPO against the composite reward.
    PpoFinetune(commands::ppo_finetune::PpoFinetuneArgs),
    /// Generate summaries with a trained checkpoint.
    Summarize(commands::summarize::SummarizeArgs),
    /// Score generated summaries against references.
    Score(commands::score::ScoreArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    if let Some(out_dir) = cli.out_dir {
        cfg.paths.out_dir = out_dir;
    }
    cfg.validate()?;
    fs::create_dir_all(&cfg.paths.out_dir).with_context(|| {
        format!("creating output directory {}", cfg.paths.out_dir.display())
    })?;

    match &cli.command {
        Command::Stats(args) => commands::stats::run(args, &cfg),
        Command::TrainEepd(args) => commands::train_eepd::run(args, &mut cfg),
        Command::EvalEepd(args) => commands::eval_eepd::run(args, &cfg),
        Command::PseudoLabel(args) => commands::pseudo_label::run(args, &cfg),
        Command::TrainSummarizer(args) => commands::train_summarizer::run(args, &mut cfg),
        Command::PpoFinetune(args) => commands::ppo_finetune::run(args, &mut cfg),
        Command::Summarize(args) => commands::summarize::run(args, &cfg),
        Command::Score(args) => commands::score::run(args, &mut cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
