use crate::corpus::{AnnotatedDocument, Record};
use crate::error::Result;
use crate::nn::Vocab;
use crate::scoring::RewardBreakdown;
use crate::summarizer::{GenerationConfig, Seq2SeqModel, SummarizerModelConfig};

use super::config::PPOConfig;
use super::policy::PolicyModel;
use super::trainer::RewardModel;

/// Reward for the sanity-check task: the fraction of required keywords
/// that appear in the response, ignoring the document entirely.
pub struct KeywordReward {
    pub keywords: Vec<String>,
}

impl RewardModel for KeywordReward {
    fn reward(&self, _doc: &AnnotatedDocument, response: &[String]) -> Result<RewardBreakdown> {
        let found = self
            .keywords
            .iter()
            .filter(|k| response.iter().any(|t| t == *k))
            .count();
        let frac = found as f64 / self.keywords.len() as f64;
        Ok(RewardBreakdown {
            r1: frac,
            r2: 0.0,
            r3: 0.0,
            composite: frac,
        })
    }
}

/// Everything needed to run the keyword task: a small untrained policy,
/// its frozen twin, a handful of prompts, and settings sized so learning
/// is visible within tens of steps.
pub struct ToyTask {
    pub policy: PolicyModel,
    pub reference: Seq2SeqModel,
    pub docs: Vec<AnnotatedDocument>,
    pub reward: KeywordReward,
    pub gen_cfg: GenerationConfig,
    pub ppo_cfg: PPOConfig,
}

pub fn toy_keyword_task(seed: u64) -> ToyTask {
    let keywords: Vec<String> = ["cookies", "consent", "retention", "sharing", "deletion"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let fillers = [
        "we", "use", "your", "data", "may", "policy", "site", "terms", "this", "and",
    ];
    let vocab = Vocab::build(
        keywords
            .iter()
            .map(|s| s.as_str())
            .chain(fillers.into_iter()),
    );

    let texts = [
        "we use cookies and your data on this site.",
        "this policy may use your data and terms.",
        "your consent and deletion terms may use this site.",
        "we may use sharing and retention terms.",
    ];
    let docs = texts
        .iter()
        .enumerate()
        .map(|(i, text)| {
            AnnotatedDocument::from_record(Record {
                id: format!("toy-{i}"),
                text: text.to_string(),
                entities: Vec::new(),
                summary: text.to_string(),
                summary_entities: Vec::new(),
                entity_provenance: Default::default(),
            })
            .expect("toy document is valid")
        })
        .collect();

    let model_cfg = SummarizerModelConfig {
        d_model: 16,
        d_ff: 32,
        dropout: 0.0,
        max_src_len: 32,
        max_tgt_len: 24,
        ..Default::default()
    };
    let base = Seq2SeqModel::new(model_cfg, vocab, seed);
    let reference = base.clone();
    let policy = PolicyModel::from_summarizer(base, seed + 1);

    let gen_cfg = GenerationConfig {
        max_seq_length: 16,
        min_new_tokens: 12,
        top_p: 1.0,
        top_k: 12,
        do_sample: true,
        num_beams: 1,
        use_cache: true,
    };
    let ppo_cfg = PPOConfig {
        learning_rate: 6e-3,
        warmup_frac: 0.1,
        gamma: 1.0,
        lambda_gae: 0.95,
        clip_epsilon: 0.2,
        init_kl_coef: 0.03,
        adaptive_kl_coef: true,
        kl_target: 10.0,
        kl_horizon: 48,
        batch_size: 16,
        mini_batch_size: 4,
        epochs_per_batch: 3,
        vf_coef: 0.5,
        max_grad_norm: 1.0,
        normalize_rewards: false,
        steps: 50,
        seed,
    };

    ToyTask {
        policy,
        reference,
        docs,
        reward: KeywordReward { keywords },
        gen_cfg,
        ppo_cfg,
    }
}
