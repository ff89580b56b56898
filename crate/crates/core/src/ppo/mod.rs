//! Reinforcement-learning fine-tuning of the summarizer.
//!
//! The trained summarizer becomes a policy with a value head on its
//! decoder trunk; a frozen copy serves as the KL reference. Sampled
//! summaries are scored by the composite reward, the terminal score is
//! spread over tokens through a KL-shaped reward, advantages come from
//! generalized advantage estimation, and updates use the clipped
//! surrogate objective with value clipping and an adaptive KL penalty.

pub mod config;
pub mod gae;
pub mod kl;
pub mod policy;
pub mod rollout;
pub mod step;
pub mod toy;
pub mod trainer;

pub use config::PPOConfig;
pub use gae::{gae_advantages, whiten};
pub use kl::{adaptive_kl_update, per_token_kl};
pub use policy::{response_logp, PolicyModel};
pub use rollout::{shape_rewards, shaped_token_rewards, RolloutRecord};
pub use step::{clipped_objective, clipped_value_error, ppo_step, PPOStepStats, ProcessedRollout};
pub use toy::{toy_keyword_task, KeywordReward, ToyTask};
pub use trainer::{
    ppo_finetune, write_step_csv, CompositeRewardModel, PPORunSummary, PPOStepRecord, RewardModel,
};
