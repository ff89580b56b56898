use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::AnnotatedDocument;
use crate::error::{Error, Result};
use crate::nn::warmup_lr;
use crate::scoring::{composite_reward, EntityExtractor, RewardBreakdown, RewardConfig};
use crate::summarizer::{generate_ids, GenerationConfig, Seq2SeqModel};

use super::config::PPOConfig;
use super::gae::{gae_advantages, whiten};
use super::kl::{adaptive_kl_update, per_token_kl};
use super::policy::{response_logp, PolicyModel};
use super::rollout::{shape_rewards, RolloutRecord};
use super::step::{ppo_step, ProcessedRollout};

/// Scores a generated response against its source document. Errors mark
/// the sample as unusable; the training loop skips it and moves on.
pub trait RewardModel: Sync {
    fn reward(&self, doc: &AnnotatedDocument, response: &[String]) -> Result<RewardBreakdown>;
}

/// The full summary reward: lexical overlap with the reference summary,
/// length agreement, and extractor-verified entity coverage.
pub struct CompositeRewardModel<'a> {
    pub extractor: &'a dyn EntityExtractor,
    pub config: RewardConfig,
}

impl RewardModel for CompositeRewardModel<'_> {
    fn reward(&self, doc: &AnnotatedDocument, response: &[String]) -> Result<RewardBreakdown> {
        let gold: Vec<String> = doc
            .summary_entities
            .iter()
            .map(|s| doc.summary.tokens[s.b..=s.e].join(" "))
            .collect();
        Ok(composite_reward(
            response,
            &doc.summary.tokens,
            &gold,
            self.extractor,
            &self.config,
        ))
    }
}

/// Per-step curve point of a fine-tuning run. Reward components are raw
/// batch means; `kl` is the mean per-sequence KL sum observed when the
/// batch was collected, and `kl_coef` the penalty weight used to shape
/// it. Losses average over the step's optimizer updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PPOStepRecord {
    pub step: usize,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub composite: f64,
    pub kl: f64,
    pub kl_coef: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub n_rollouts: usize,
    pub n_skipped: usize,
}

#[derive(Debug, Clone)]
pub struct PPORunSummary {
    pub steps: Vec<PPOStepRecord>,
    pub final_kl_coef: f64,
}

/// Reinforcement-learning fine-tuning of a summarization policy against
/// a frozen reference. Each step samples prompts, generates responses,
/// scores them, shapes per-token rewards from the KL penalty and the
/// terminal score, estimates advantages, and runs clipped-surrogate
/// updates over mini-batches. `on_step` fires after every step with the
/// curve point and current policy, for streaming logs and checkpoints.
pub fn ppo_finetune<R: RewardModel + ?Sized>(
    policy: &mut PolicyModel,
    reference: &Seq2SeqModel,
    docs: &[AnnotatedDocument],
    reward_model: &R,
    gen_cfg: &GenerationConfig,
    cfg: &PPOConfig,
    mut on_step: Option<&mut dyn FnMut(&PPOStepRecord, &PolicyModel) -> Result<()>>,
) -> Result<PPORunSummary> {
    cfg.validate()?;
    gen_cfg.validate()?;
    if docs.is_empty() {
        return Err(Error::Config("fine-tuning corpus is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut kl_coef = cfg.init_kl_coef;
    let mut steps = Vec::with_capacity(cfg.steps);

    for step in 0..cfg.steps {
        let lr = step_lr(cfg, step);

        let mut rollouts: Vec<RolloutRecord> = Vec::with_capacity(cfg.batch_size);
        let mut n_skipped = 0usize;
        for _ in 0..cfg.batch_size {
            let doc = &docs[rng.gen_range(0..docs.len())];
            let sample_seed: u64 = rng.gen();
            let ids = generate_ids(&policy.model, &doc.text.tokens, gen_cfg, sample_seed)?;
            if ids.is_empty() {
                log::warn!("document {}: empty generation, sample skipped", doc.id);
                n_skipped += 1;
                continue;
            }
            let response = policy.model.vocab.decode(&ids);
            let reward = match reward_model.reward(doc, &response) {
                Ok(r) => r,
                Err(e) => {
                    log::warn!("document {}: reward failed ({e}), sample skipped", doc.id);
                    n_skipped += 1;
                    continue;
                }
            };
            let (policy_logp, values) = policy.logp_and_values(&doc.text.tokens, &ids)?;
            let ref_logp = response_logp(reference, &doc.text.tokens, &ids)?;
            let record = RolloutRecord {
                prompt: doc.text.tokens.clone(),
                response_ids: ids,
                policy_logp,
                ref_logp,
                values,
                reward,
            };
            record.validate()?;
            rollouts.push(record);
        }

        if rollouts.is_empty() {
            log::warn!("step {step}: every sample was skipped, no update made");
            let record = PPOStepRecord {
                step,
                r1: 0.0,
                r2: 0.0,
                r3: 0.0,
                composite: 0.0,
                kl: 0.0,
                kl_coef,
                policy_loss: 0.0,
                value_loss: 0.0,
                n_rollouts: 0,
                n_skipped,
            };
            if let Some(cb) = on_step.as_deref_mut() {
                cb(&record, policy)?;
            }
            steps.push(record);
            continue;
        }

        let n = rollouts.len() as f64;
        let mean = |f: fn(&RewardBreakdown) -> f64| {
            rollouts.iter().map(|r| f(&r.reward)).sum::<f64>() / n
        };
        let (r1, r2, r3) = (mean(|r| r.r1), mean(|r| r.r2), mean(|r| r.r3));
        let composite = mean(|r| r.composite);

        let kls: Vec<Vec<f64>> = rollouts
            .iter()
            .map(|r| per_token_kl(&r.policy_logp, &r.ref_logp))
            .collect::<Result<_>>()?;
        let observed_kl = kls.iter().map(|k| k.iter().sum::<f64>()).sum::<f64>() / n;

        let composites: Vec<f64> = rollouts.iter().map(|r| r.reward.composite).collect();
        let terminals = if cfg.normalize_rewards && rollouts.len() >= 2 {
            whiten(&composites)
        } else {
            composites
        };

        let mut processed = Vec::with_capacity(rollouts.len());
        let mut flat_adv = Vec::new();
        for ((record, kl), terminal) in rollouts.into_iter().zip(&kls).zip(&terminals) {
            let shaped = shape_rewards(kl, *terminal, kl_coef);
            let (advantages, returns) =
                gae_advantages(&shaped, &record.values, cfg.gamma, cfg.lambda_gae)?;
            flat_adv.extend(&advantages);
            processed.push(ProcessedRollout {
                record,
                advantages,
                returns,
            });
        }
        let whitened = whiten(&flat_adv);
        let mut offset = 0;
        for rollout in processed.iter_mut() {
            let n_tok = rollout.advantages.len();
            rollout.advantages = whitened[offset..offset + n_tok].to_vec();
            offset += n_tok;
        }

        let mut policy_loss_sum = 0.0;
        let mut value_loss_sum = 0.0;
        let mut n_updates = 0usize;
        for _ in 0..cfg.epochs_per_batch {
            processed.shuffle(&mut rng);
            for minibatch in processed.chunks(cfg.mini_batch_size) {
                let stats = ppo_step(policy, minibatch, cfg, lr)?;
                policy_loss_sum += stats.policy_loss;
                value_loss_sum += stats.value_loss;
                n_updates += 1;
            }
        }

        if cfg.adaptive_kl_coef {
            kl_coef = adaptive_kl_update(
                kl_coef,
                observed_kl,
                cfg.kl_target,
                processed.len(),
                cfg.kl_horizon,
            );
        }

        let record = PPOStepRecord {
            step,
            r1,
            r2,
            r3,
            composite,
            kl: observed_kl,
            kl_coef,
            policy_loss: policy_loss_sum / n_updates as f64,
            value_loss: value_loss_sum / n_updates as f64,
            n_rollouts: processed.len(),
            n_skipped,
        };
        if let Some(cb) = on_step.as_deref_mut() {
            cb(&record, policy)?;
        }
        steps.push(record);
    }

    Ok(PPORunSummary {
        steps,
        final_kl_coef: kl_coef,
    })
}

/// Learning rate at a PPO step: linear warmup over the configured
/// fraction of the run, then linear decay to 30% of the base rate by
/// the final step.
fn step_lr(cfg: &PPOConfig, step: usize) -> f64 {
    let warmed = warmup_lr(
        cfg.learning_rate,
        step as u64,
        cfg.steps as u64,
        cfg.warmup_frac,
    );
    let warmup_steps = (cfg.steps as f64 * cfg.warmup_frac).ceil();
    let decay_span = cfg.steps as f64 - warmup_steps;
    if warmed < cfg.learning_rate || decay_span <= 0.0 {
        return warmed;
    }
    let progress = (step as f64 - warmup_steps) / decay_span;
    cfg.learning_rate * (1.0 - 0.7 * progress.clamp(0.0, 1.0))
}

/// Writes the per-step curves as CSV, one row per PPO step.
pub fn write_step_csv(records: &[PPOStepRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    writeln!(
        file,
        "step,r1,r2,r3,composite,kl,kl_coef,policy_loss,value_loss"
    )
    .map_err(io_err)?;
    for r in records {
        writeln!(
            file,
            "{},{},{},{},{},{},{},{},{}",
            r.step, r.r1, r.r2, r.r3, r.composite, r.kl, r.kl_coef, r.policy_loss, r.value_loss
        )
        .map_err(io_err)?;
    }
    Ok(())
}
