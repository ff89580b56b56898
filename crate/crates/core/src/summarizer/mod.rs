//! Entity-aware abstractive summarization: a sequence-to-sequence model
//! trained with a cross-entropy objective mixed with a penalty for
//! entities missing from the summary, plus nucleus-sampled generation.

pub mod checkpoint;
pub mod generate;
pub mod loss;
pub mod model;
pub mod penalty;
pub mod train;

pub use checkpoint::{
    load_summarizer_checkpoint, save_summarizer_checkpoint, SummarizerManifest,
};
pub use generate::{generate_ids, generate_summary, GenerationConfig};
pub use loss::{
    combine, examples_from_docs, summarizer_loss, SummarizationExample, SummarizerLossBreakdown,
    SummarizerLossConfig, TpMode,
};
pub use model::{DecoderState, Seq2SeqModel, SummarizerModelConfig};
pub use penalty::{locate_entity, token_penalty};
pub use train::{
    train_summarizer, train_summarizer_examples, SummarizerEpochStats, SummarizerTrainConfig,
};
