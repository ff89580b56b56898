//! `polsum eval-eepd`: span precision/recall/F1 of a trained extractor
//! against a gold-annotated corpus.

use std::path::PathBuf;

use polsum_core::eepd::{evaluate_eepd, load_eepd_checkpoint};

use crate::config::PipelineConfig;
use crate::manifest::RunManifest;
use crate::util::{require_checkpoint, write_json_pretty, CorpusArgs};

#[derive(Debug, clap::Args)]
pub struct EvalEepdArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Extractor checkpoint directory; falls back to `paths.eepd_checkpoint`
    /// in the config, then to `<out-dir>/eepd`.
    #[arg(long, value_name = "DIR")]
    pub checkpoint: Option<PathBuf>,
}

pub fn resolve_eepd_checkpoint(flag: &Option<PathBuf>, cfg: &PipelineConfig) -> PathBuf {
    flag.clone()
        .or_else(|| cfg.paths.eepd_checkpoint.clone())
        .unwrap_or_else(|| cfg.paths.out_dir.join("eepd"))
}

pub fn run(args: &EvalEepdArgs, cfg: &PipelineConfig) -> anyhow::Result<()> {
    let ckpt = resolve_eepd_checkpoint(&args.checkpoint, cfg);
    require_checkpoint(&ckpt, "polsum train-eepd")?;
    let (model, _) = load_eepd_checkpoint(&ckpt)?;

    let (path, docs) = args.corpus.load(cfg)?;
    let eval = evaluate_eepd(&model, &docs);

    let out_dir = &cfg.paths.out_dir;
    write_json_pretty(&out_dir.join("eepd_eval.json"), &eval)?;
    println!("{}", serde_json::to_string_pretty(&eval)?);

    let mut manifest = RunManifest::new("eval-eepd", cfg);
    manifest.add_input(&path)?;
    manifest.add_input_dir(&ckpt)?;
    manifest.add_output("eepd_eval.json");
    manifest.write(out_dir)?;
    Ok(())
}
