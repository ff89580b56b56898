//! `polsum stats`: corpus summary statistics.

use polsum_core::corpus::corpus_stats;

use crate::config::PipelineConfig;
use crate::manifest::RunManifest;
use crate::util::{write_json_pretty, CorpusArgs};

#[derive(Debug, clap::Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
}

pub fn run(args: &StatsArgs, cfg: &PipelineConfig) -> anyhow::Result<()> {
    let (path, docs) = args.corpus.load(cfg)?;
    let stats = corpus_stats(&docs)?;

    let out_dir = &cfg.paths.out_dir;
    write_json_pretty(&out_dir.join("stats.json"), &stats)?;
    println!("{}", serde_json::to_string_pretty(&stats)?);

    let mut manifest = RunManifest::new("stats", cfg);
    manifest.add_input(&path)?;
    manifest.add_output("stats.json");
    manifest.write(out_dir)?;
    Ok(())
}
