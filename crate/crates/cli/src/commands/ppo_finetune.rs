//! `polsum ppo-finetune`: reinforcement-learning fine-tuning of a trained
//! summarizer against the composite reward, with a frozen reference copy
//! holding the policy near its starting distribution.

use std::path::PathBuf;

use polsum_core::eepd::load_eepd_checkpoint;
use polsum_core::ppo::{
    ppo_finetune, write_step_csv, CompositeRewardModel, PPOStepRecord, PolicyModel,
};
use polsum_core::summarizer::{load_summarizer_checkpoint, save_summarizer_checkpoint};

use crate::commands::eval_eepd::resolve_eepd_checkpoint;
use crate::config::PipelineConfig;
use crate::manifest::RunManifest;
use crate::util::{require_checkpoint, CorpusArgs};

#[derive(Debug, clap::Args)]
pub struct PpoFinetuneArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Summarizer checkpoint to start from; falls back to
    /// `paths.summarizer_checkpoint` in the config, then `<out-dir>/summarizer`.
    #[arg(long, value_name = "DIR")]
    pub summarizer: Option<PathBuf>,
    /// Entity-extractor checkpoint for the entity reward; falls back to
    /// `paths.eepd_checkpoint` in the config, then `<out-dir>/eepd`.
    #[arg(long, value_name = "DIR")]
    pub eepd: Option<PathBuf>,
    /// Save an intermediate policy checkpoint every N steps (0 disables).
    #[arg(long, default_value_t = 0, value_name = "N")]
    pub checkpoint_every: usize,

    /// Override the configured optimizer learning rate.
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Override the configured warmup fraction.
    #[arg(long)]
    pub warmup_frac: Option<f64>,
    /// Override the configured reward discount.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Override the configured advantage-estimation decay.
    #[arg(long)]
    pub lambda_gae: Option<f64>,
    /// Override the configured probability-ratio clip width.
    #[arg(long)]
    pub clip_epsilon: Option<f64>,
    /// Override the configured initial KL-penalty weight.
    #[arg(long)]
    pub init_kl_coef: Option<f64>,
    /// Override whether the KL-penalty weight adapts toward the target.
    #[arg(long)]
    pub adaptive_kl_coef: Option<bool>,
    /// Override the configured per-sequence KL target.
    #[arg(long)]
    pub kl_target: Option<f64>,
    /// Override the configured KL-controller horizon.
    #[arg(long)]
    pub kl_horizon: Option<usize>,
    /// Override the configured rollouts per step.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Override the configured rollouts per gradient update.
    #[arg(long)]
    pub mini_batch_size: Option<usize>,
    /// Override the configured optimization passes per batch.
    #[arg(long)]
    pub epochs_per_batch: Option<usize>,
    /// Override the configured value-loss weight.
    #[arg(long)]
    pub vf_coef: Option<f64>,
    /// Override the configured gradient clip norm.
    #[arg(long)]
    pub max_grad_norm: Option<f64>,
    /// Override whether terminal rewards are whitened within each batch.
    #[arg(long)]
    pub normalize_rewards: Option<bool>,
    /// Override the configured number of PPO steps.
    #[arg(long)]
    pub steps: Option<usize>,
}

impl PpoFinetuneArgs {
    fn apply(&self, cfg: &mut PipelineConfig) {
        let ppo = &mut cfg.ppo;
        macro_rules! take {
            ($($field:ident),+) => {
                $( if let Some(v) = self.$field { ppo.$field = v; } )+
            };
        }
        take!(
            learning_rate,
            warmup_frac,
            gamma,
            lambda_gae,
            clip_epsilon,
            init_kl_coef,
            adaptive_kl_coef,
            kl_target,
            kl_horizon,
            batch_size,
            mini_batch_size,
            epochs_per_batch,
            vf_coef,
            max_grad_norm,
            normalize_rewards,
            steps
        );
    }
}

pub fn run(args: &PpoFinetuneArgs, cfg: &mut PipelineConfig) -> anyhow::Result<()> {
    args.apply(cfg);

    let summarizer_dir = args
        .summarizer
        .clone()
        .or_else(|| cfg.paths.summarizer_checkpoint.clone())
        .unwrap_or_else(|| cfg.paths.out_dir.join("summarizer"));
    require_checkpoint(&summarizer_dir, "polsum train-summarizer")?;
    let eepd_dir = resolve_eepd_checkpoint(&args.eepd, cfg);
    require_checkpoint(&eepd_dir, "polsum train-eepd")?;

    let (base, loss_cfg, _) = load_summarizer_checkpoint(&summarizer_dir)?;
    let reference = base.clone();
    let mut policy = PolicyModel::from_summarizer(base, cfg.seed.wrapping_add(1));
    let (extractor, _) = load_eepd_checkpoint(&eepd_dir)?;
    let reward_model = CompositeRewardModel {
        extractor: &extractor,
        config: cfg.reward.clone(),
    };

    let (path, docs) = args.corpus.load(cfg)?;
    log::info!(
        "running {} PPO steps over {} documents (batch {})",
        cfg.ppo.steps,
        docs.len(),
        cfg.ppo.batch_size
    );

    let out_dir = cfg.paths.out_dir.clone();
    let policy_dir = out_dir.join("policy");
    let checkpoint_every = args.checkpoint_every;
    let gen_cfg = cfg.generation.clone();
    let loss_for_ckpt = loss_cfg.clone();
    let mut records: Vec<PPOStepRecord> = Vec::with_capacity(cfg.ppo.steps);
    let mut intermediate: Vec<String> = Vec::new();
    let mut on_step = |record: &PPOStepRecord, model: &PolicyModel| -> polsum_core::Result<()> {
        println!(
            "step {:>3}: composite {:.4} (r1 {:.4}, r2 {:.4}, r3 {:.4}) kl {:.4} coef {:.5} rollouts {}",
            record.step,
            record.composite,
            record.r1,
            record.r2,
            record.r3,
            record.kl,
            record.kl_coef,
            record.n_rollouts
        );
        records.push(*record);
        if checkpoint_every > 0 && (record.step + 1) % checkpoint_every == 0 {
            let dir = policy_dir.join(format!("step-{:04}", record.step));
            save_summarizer_checkpoint(&model.model, &loss_for_ckpt, &gen_cfg, &dir)?;
            intermediate.push(format!("policy/step-{:04}", record.step));
        }
        Ok(())
    };

    let summary = ppo_finetune(
        &mut policy,
        &reference,
        &docs,
        &reward_model,
        &cfg.generation,
        &cfg.ppo,
        Some(&mut on_step),
    )?;

    write_step_csv(&records, out_dir.join("ppo_steps.csv"))?;
    let final_dir = policy_dir.join("final");
    save_summarizer_checkpoint(&policy.model, &loss_cfg, &cfg.generation, &final_dir)?;

    if let (Some(first), Some(last)) = (records.first(), records.last()) {
        println!(
            "finished {} steps: composite {:.4} -> {:.4}, final kl coefficient {:.5}",
            summary.steps.len(),
            first.composite,
            last.composite,
            summary.final_kl_coef
        );
    }
    println!("policy checkpoint written to {}", final_dir.display());

    let mut manifest = RunManifest::new("ppo-finetune", cfg);
    manifest.add_input(&path)?;
    manifest.add_input_dir(&summarizer_dir)?;
    manifest.add_input_dir(&eepd_dir)?;
    manifest.add_output("ppo_steps.csv");
    manifest.add_output("policy/final");
    for name in &intermediate {
        manifest.add_output(name);
    }
    manifest.write(&out_dir)?;
    Ok(())
}
