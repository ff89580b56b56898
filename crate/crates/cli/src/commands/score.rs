//! `polsum score`: offline evaluation of generated summaries. Reads
//! JSON-Lines of `{"generated", "reference", "gold_entities"}` and writes a
//! single JSON report combining overlap metrics with the mean per-pair
//! rewards.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use polsum_core::corpus::tokenize;
use polsum_core::eepd::load_eepd_checkpoint;
use polsum_core::scoring::{
    composite_reward, evaluate_summaries, EntityExtractor, EvalPair, MetricsReport, R2Mode,
    SurfaceMatchExtractor,
};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::manifest::RunManifest;
use crate::util::{require_checkpoint, write_json_pretty};

#[derive(Debug, clap::Args)]
pub struct ScoreArgs {
    /// JSON-Lines file of {"generated", "reference", "gold_entities"}.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Use the length reward exactly as typeset, (1 - |dlen|) / max(len),
    /// instead of the bounded 1 - |dlen| / max(len).
    #[arg(long)]
    pub r2_literal: bool,
    /// Override the penalty factor for incorrect entities in the entity
    /// reward.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Override the reward weights as three comma-separated numbers, e.g.
    /// `--weights 1,0.5,2`.
    #[arg(long, value_name = "W1,W2,W3", value_parser = parse_weights)]
    pub weights: Option<Weights>,
    /// Count entities with a trained extractor checkpoint instead of
    /// surface-matching the gold entities.
    #[arg(long, value_name = "DIR")]
    pub eepd: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub struct Weights(pub [f64; 3]);

fn parse_weights(s: &str) -> Result<Weights, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated numbers, e.g. 1,1,1".to_string());
    }
    let mut w = [0.0; 3];
    for (slot, part) in w.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad weight {part:?}: {e}"))?;
    }
    Ok(Weights(w))
}

#[derive(Debug, Deserialize)]
struct PairRecord {
    generated: String,
    reference: String,
    #[serde(default)]
    gold_entities: Vec<String>,
}

/// The emitted report: every overlap metric plus the reward means the
/// fine-tuning stage optimizes.
#[derive(Debug, Serialize)]
struct ScoreReport {
    #[serde(flatten)]
    metrics: MetricsReport,
    mean_r1: f64,
    mean_r2: f64,
    mean_r3: f64,
    mean_composite: f64,
}

fn read_pairs(path: &PathBuf) -> anyhow::Result<Vec<EvalPair>> {
    let raw =
        fs::read_to_string(path).with_context(|| format!("reading pairs {}", path.display()))?;
    let mut pairs = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: PairRecord = serde_json::from_str(line)
            .with_context(|| format!("{}: bad record on line {}", path.display(), i + 1))?;
        pairs.push(EvalPair {
            generated: tokenize(&record.generated).tokens,
            reference: tokenize(&record.reference).tokens,
            gold_entities: record.gold_entities,
        });
    }
    if pairs.is_empty() {
        bail!("{}: no pairs found", path.display());
    }
    Ok(pairs)
}

pub fn run(args: &ScoreArgs, cfg: &mut PipelineConfig) -> anyhow::Result<()> {
    if args.r2_literal {
        cfg.reward.r2_mode = R2Mode::Literal;
    }
    if let Some(beta) = args.beta {
        cfg.reward.beta = beta;
    }
    if let Some(Weights([w1, w2, w3])) = args.weights {
        cfg.reward.w1 = w1;
        cfg.reward.w2 = w2;
        cfg.reward.w3 = w3;
    }
    cfg.reward.validate().context("reward settings")?;

    let pairs = read_pairs(&args.input)?;

    let trained = match &args.eepd {
        Some(dir) => {
            require_checkpoint(dir, "polsum train-eepd")?;
            Some(load_eepd_checkpoint(dir)?.0)
        }
        None => None,
    };
    let merged_gold = SurfaceMatchExtractor {
        gold: pairs
            .iter()
            .flat_map(|p| p.gold_entities.iter().cloned())
            .collect(),
    };
    let corpus_extractor: &dyn EntityExtractor = match &trained {
        Some(model) => model,
        None => &merged_gold,
    };

    let metrics = evaluate_summaries(&pairs, corpus_extractor)?;

    let mut sums = [0.0f64; 4];
    for pair in &pairs {
        let per_pair = SurfaceMatchExtractor {
            gold: pair.gold_entities.clone(),
        };
        let extractor: &dyn EntityExtractor = match &trained {
            Some(model) => model,
            None => &per_pair,
        };
        let breakdown = composite_reward(
            &pair.generated,
            &pair.reference,
            &pair.gold_entities,
            extractor,
            &cfg.reward,
        );
        sums[0] += breakdown.r1;
        sums[1] += breakdown.r2;
        sums[2] += breakdown.r3;
        sums[3] += breakdown.composite;
    }
    let n = pairs.len() as f64;
    let report = ScoreReport {
        metrics,
        mean_r1: sums[0] / n,
        mean_r2: sums[1] / n,
        mean_r3: sums[2] / n,
        mean_composite: sums[3] / n,
    };

    let out_dir = &cfg.paths.out_dir;
    write_json_pretty(&out_dir.join("score.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    let mut manifest = RunManifest::new("score", cfg);
    manifest.add_input(&args.input)?;
    if let Some(dir) = &args.eepd {
        manifest.add_input_dir(dir)?;
    }
    manifest.add_output("score.json");
    manifest.write(out_dir)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_parse_and_reject() {
        let Weights(w) = parse_weights("1,0.5,2").unwrap();
        assert_eq!(w, [1.0, 0.5, 2.0]);
        let Weights(w) = parse_weights(" 1 , 1 , 1 ").unwrap();
        assert_eq!(w, [1.0, 1.0, 1.0]);
        assert!(parse_weights("1,2").is_err());
        assert!(parse_weights("a,b,c").is_err());
    }
}
