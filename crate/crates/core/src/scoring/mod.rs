//! Reward functions and offline evaluation metrics for generated summaries.

pub mod bleu;
pub mod embed;
pub mod lcs;
pub mod meteor;
pub mod normalize;
pub mod report;
pub mod rewards;
pub mod rouge;

pub use bleu::{bleu_n, brevity_penalty};
pub use embed::{embedding_similarity, CharNgramEncoder, TokenEncoder};
pub use lcs::lcs_length;
pub use meteor::meteor;
pub use normalize::{is_punctuation_token, normalize_surface, normalize_tokens};
pub use report::{evaluate_summaries, evaluate_summaries_with, EvalPair, MetricsReport};
pub use rewards::{
    composite_reward, match_entities, reward_r2, reward_r3, EntityExtractor, EntityMatchResult,
    FixedExtractor, R2Mode, RewardBreakdown, RewardConfig, SurfaceMatchExtractor,
};
pub use rouge::{ngram_counts, ngram_overlap, rouge_l, rouge_n, PrfScore};
