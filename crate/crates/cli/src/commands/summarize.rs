//! `polsum summarize`: generate summaries for documents with a trained
//! checkpoint. Accepts either a corpus JSON-Lines file or a plain-text file
//! (treated as one document) and emits one `{"id", "summary"}` record per
//! document.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use polsum_core::corpus::tokenize;
use polsum_core::summarizer::{generate_summary, load_summarizer_checkpoint};
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::manifest::RunManifest;
use crate::util::{load_checked_corpus, require_checkpoint};

#[derive(Debug, clap::Args)]
pub struct SummarizeArgs {
    /// Input file: a corpus JSON-Lines file, or any other text file, which
    /// is summarized as a single document.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Summarizer checkpoint directory; falls back to
    /// `paths.summarizer_checkpoint` in the config, then `<out-dir>/summarizer`.
    /// A PPO policy checkpoint (`policy/final`) loads the same way.
    #[arg(long, value_name = "DIR")]
    pub checkpoint: Option<PathBuf>,
    /// Destination; defaults to `<out-dir>/summaries.jsonl`.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// For corpus input, verify that entity spans survive re-tokenization.
    #[arg(long)]
    pub retokenize_check: bool,
}

#[derive(Debug, Serialize)]
struct SummaryRecord {
    id: String,
    summary: String,
}

/// A file whose first non-blank line is a JSON object with "id" and "text"
/// is read as a corpus; anything else is one plain-text document.
fn looks_like_corpus(raw: &str) -> bool {
    raw.lines()
        .find(|l| !l.trim().is_empty())
        .and_then(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .map(|v| v.get("id").is_some() && v.get("text").is_some())
        .unwrap_or(false)
}

fn read_inputs(
    path: &Path,
    retokenize: bool,
) -> anyhow::Result<Vec<(String, Vec<String>)>> {
    let raw =
        fs::read_to_string(path).with_context(|| format!("reading input {}", path.display()))?;
    if looks_like_corpus(&raw) {
        let docs = load_checked_corpus(path, retokenize)?;
        return Ok(docs
            .into_iter()
            .map(|d| (d.id, d.text.tokens))
            .collect());
    }
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "document".to_string());
    let tokens = tokenize(&raw).tokens;
    if tokens.is_empty() {
        bail!("input {} contains no tokens", path.display());
    }
    Ok(vec![(id, tokens)])
}

pub fn run(args: &SummarizeArgs, cfg: &PipelineConfig) -> anyhow::Result<()> {
    let ckpt = args
        .checkpoint
        .clone()
        .or_else(|| cfg.paths.summarizer_checkpoint.clone())
        .unwrap_or_else(|| cfg.paths.out_dir.join("summarizer"));
    require_checkpoint(&ckpt, "polsum train-summarizer")?;
    let (model, _, _) = load_summarizer_checkpoint(&ckpt)?;

    let inputs = read_inputs(&args.input, args.retokenize_check)?;
    let out_dir = &cfg.paths.out_dir;
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| out_dir.join("summaries.jsonl"));

    let mut lines = String::new();
    for (i, (id, tokens)) in inputs.iter().enumerate() {
        let summary =
            generate_summary(&model, tokens, &cfg.generation, cfg.seed.wrapping_add(i as u64))?;
        let record = SummaryRecord {
            id: id.clone(),
            summary: summary.join(" "),
        };
        let line = serde_json::to_string(&record)?;
        println!("{line}");
        lines.push_str(&line);
        lines.push('\n');
    }
    fs::write(&output, lines).with_context(|| format!("writing {}", output.display()))?;
    log::info!("wrote {} summaries to {}", inputs.len(), output.display());

    let mut manifest = RunManifest::new("summarize", cfg);
    manifest.add_input(&args.input)?;
    manifest.add_input_dir(&ckpt)?;
    manifest.add_output(&output.display().to_string());
    manifest.write(out_dir)?;
    Ok(())
}
