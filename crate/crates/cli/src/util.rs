//! Helpers shared by the command implementations.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use polsum_core::corpus::{
    load_corpus, retokenize_check, validate_corpus, AnnotatedDocument,
};
use polsum_core::nn::Vocab;
use polsum_core::Error;
use serde::Serialize;

use crate::config::PipelineConfig;

/// Corpus selection shared by the commands that read an annotated corpus.
#[derive(Debug, clap::Args)]
pub struct CorpusArgs {
    /// Corpus JSON-Lines file; falls back to `paths.corpus` in the config.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// After loading, verify that every entity span re-tokenizes to its own
    /// surface text and fail if any document does not.
    #[arg(long)]
    pub retokenize_check: bool,
}

impl CorpusArgs {
    pub fn resolve(&self, cfg: &PipelineConfig) -> anyhow::Result<PathBuf> {
        match self.corpus.clone().or_else(|| cfg.paths.corpus.clone()) {
            Some(path) => Ok(path),
            None => bail!("no corpus given; pass --corpus or set paths.corpus in the config"),
        }
    }

    pub fn load(&self, cfg: &PipelineConfig) -> anyhow::Result<(PathBuf, Vec<AnnotatedDocument>)> {
        let path = self.resolve(cfg)?;
        let docs = load_checked_corpus(&path, self.retokenize_check)?;
        Ok((path, docs))
    }
}

/// Loads a corpus, logs validation warnings, and optionally enforces the
/// span/surface re-tokenization check.
pub fn load_checked_corpus(path: &Path, retokenize: bool) -> anyhow::Result<Vec<AnnotatedDocument>> {
    let docs = load_corpus(path).with_context(|| format!("loading corpus {}", path.display()))?;
    for warning in validate_corpus(&docs) {
        log::warn!("{}: {warning}", path.display());
    }
    if retokenize {
        let bad = retokenize_check(&docs);
        if !bad.is_empty() {
            bail!(
                "{}: spans do not survive re-tokenization in: {}",
                path.display(),
                bad.join(", ")
            );
        }
    }
    Ok(docs)
}

/// Vocabulary over every document and summary token in the corpus.
pub fn build_vocab(docs: &[AnnotatedDocument]) -> Vocab {
    Vocab::build(
        docs.iter()
            .flat_map(|d| d.text.tokens.iter().chain(d.summary.tokens.iter()))
            .map(String::as_str),
    )
}

/// Fails with the artifact name and the command that produces it when a
/// checkpoint directory is absent or incomplete.
pub fn require_checkpoint(dir: &Path, produced_by: &str) -> anyhow::Result<()> {
    if !dir.join("manifest.json").is_file() {
        return Err(Error::MissingArtifact {
            artifact: format!("checkpoint directory {}", dir.display()),
            produced_by: produced_by.to_string(),
        }
        .into());
    }
    Ok(())
}

/// Pretty JSON with a trailing newline, written atomically enough for our
/// purposes and printed reproducibly (struct field order, sorted maps).
pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut json = serde_json::to_string_pretty(value).context("encoding JSON")?;
    json.push('\n');
    fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes a CSV with one header line and preformatted rows.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> anyhow::Result<()> {
    let mut text = String::with_capacity(header.len() + 1 + rows.iter().map(|r| r.len() + 1).sum::<usize>());
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// True when both paths name the same existing file.
pub fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}
