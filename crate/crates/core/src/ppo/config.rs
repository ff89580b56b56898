use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings for reinforcement-learning fine-tuning with a clipped
/// surrogate objective and an adaptively weighted KL penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PPOConfig {
    pub learning_rate: f64,
    /// Fraction of total optimizer steps spent ramping the learning rate.
    pub warmup_frac: f64,
    /// Discount over response tokens.
    pub gamma: f64,
    /// Advantage-estimation decay.
    pub lambda_gae: f64,
    /// Probability-ratio clip width.
    pub clip_epsilon: f64,
    /// Initial weight of the per-token KL penalty.
    pub init_kl_coef: f64,
    /// When set, the KL weight tracks `kl_target` with a proportional
    /// controller over `kl_horizon` samples.
    pub adaptive_kl_coef: bool,
    /// Target for the per-sequence KL sum.
    pub kl_target: f64,
    pub kl_horizon: usize,
    /// Prompts sampled per PPO step.
    pub batch_size: usize,
    /// Rollouts per gradient update.
    pub mini_batch_size: usize,
    /// Optimization passes over each collected batch.
    pub epochs_per_batch: usize,
    /// Weight of the value-function loss in the update.
    pub vf_coef: f64,
    /// Global gradient-norm clip.
    pub max_grad_norm: f64,
    /// Whiten composite rewards across each batch before shaping.
    pub normalize_rewards: bool,
    /// Number of collect-and-optimize steps in a run.
    pub steps: usize,
    pub seed: u64,
}

impl Default for PPOConfig {
    fn default() -> Self {
        Self {
            learning_rate: 5.41e-6,
            warmup_frac: 0.1,
            gamma: 0.99,
            lambda_gae: 0.95,
            clip_epsilon: 0.2,
            init_kl_coef: 0.2,
            adaptive_kl_coef: true,
            kl_target: 6.0,
            kl_horizon: 10_000,
            batch_size: 8,
            mini_batch_size: 2,
            epochs_per_batch: 4,
            vf_coef: 0.5,
            max_grad_norm: 1.0,
            normalize_rewards: true,
            steps: 50,
            seed: 0,
        }
    }
}

impl PPOConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::Config(format!(
                "gamma must be in (0, 1], got {}",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda_gae) {
            return Err(Error::Config("lambda_gae must be in [0, 1]".into()));
        }
        if !(self.clip_epsilon > 0.0) {
            return Err(Error::Config("clip_epsilon must be positive".into()));
        }
        if self.batch_size == 0 || self.mini_batch_size == 0 {
            return Err(Error::Config("batch sizes must be positive".into()));
        }
        if self.batch_size % self.mini_batch_size != 0 {
            return Err(Error::Config(format!(
                "mini_batch_size {} must divide batch_size {}",
                self.mini_batch_size, self.batch_size
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.warmup_frac) {
            return Err(Error::Config("warmup fraction must be in [0, 1]".into()));
        }
        if self.init_kl_coef < 0.0 {
            return Err(Error::Config("init_kl_coef must be non-negative".into()));
        }
        if self.adaptive_kl_coef && !(self.kl_target > 0.0) {
            return Err(Error::Config("kl_target must be positive".into()));
        }
        if self.kl_horizon == 0 {
            return Err(Error::Config("kl_horizon must be positive".into()));
        }
        if self.epochs_per_batch == 0 || self.steps == 0 {
            return Err(Error::Config("epochs_per_batch and steps must be positive".into()));
        }
        if self.vf_coef < 0.0 {
            return Err(Error::Config("vf_coef must be non-negative".into()));
        }
        if !(self.max_grad_norm > 0.0) {
            return Err(Error::Config("max_grad_norm must be positive".into()));
        }
        Ok(())
    }
}
