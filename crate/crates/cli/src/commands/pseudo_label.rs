//! `polsum pseudo-label`: annotate a corpus with extractor predictions,
//! marking every document as machine-labeled.

use std::path::PathBuf;

use anyhow::bail;
use polsum_core::corpus::save_corpus;
use polsum_core::eepd::{load_eepd_checkpoint, pseudo_label};

use crate::commands::eval_eepd::resolve_eepd_checkpoint;
use crate::config::PipelineConfig;
use crate::manifest::RunManifest;
use crate::util::{require_checkpoint, same_file, CorpusArgs};

#[derive(Debug, clap::Args)]
pub struct PseudoLabelArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Extractor checkpoint directory; falls back to `paths.eepd_checkpoint`
    /// in the config, then to `<out-dir>/eepd`.
    #[arg(long, value_name = "DIR")]
    pub checkpoint: Option<PathBuf>,
    /// Labeled corpus destination; defaults to `<out-dir>/pseudo_labeled.jsonl`.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Override the checkpoint's span-probability decision threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
}

pub fn run(args: &PseudoLabelArgs, cfg: &PipelineConfig) -> anyhow::Result<()> {
    let ckpt = resolve_eepd_checkpoint(&args.checkpoint, cfg);
    require_checkpoint(&ckpt, "polsum train-eepd")?;
    let (model, _) = load_eepd_checkpoint(&ckpt)?;
    let threshold = args.threshold.unwrap_or(model.config.threshold);

    let (path, docs) = args.corpus.load(cfg)?;
    let out_dir = &cfg.paths.out_dir;
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| out_dir.join("pseudo_labeled.jsonl"));
    if same_file(&path, &output) {
        bail!(
            "refusing to overwrite the input corpus {}; choose another --output",
            path.display()
        );
    }

    let labeled = pseudo_label(&model, &docs, threshold);
    save_corpus(&output, &labeled)?;

    let n_entities: usize = labeled.iter().map(|d| d.entities.len()).sum();
    println!(
        "labeled {} documents with {} entities (threshold {threshold}) -> {}",
        labeled.len(),
        n_entities,
        output.display()
    );

    let mut manifest = RunManifest::new("pseudo-label", cfg);
    manifest.add_input(&path)?;
    manifest.add_input_dir(&ckpt)?;
    manifest.add_output(&output.display().to_string());
    manifest.write(out_dir)?;
    Ok(())
}
