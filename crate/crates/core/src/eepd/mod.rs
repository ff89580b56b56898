//! Span-based entity extraction: candidate enumeration, a windowed
//! encoder with a classification head, a sentence-identification head and
//! a label-compatibility table, joint training, greedy decoding, and
//! pseudo-labeling of unannotated documents.

pub mod checkpoint;
pub mod decode;
pub mod eval;
pub mod loss;
pub mod model;
pub mod pseudo;
pub mod spans;
pub mod train;

pub use checkpoint::{load_eepd_checkpoint, save_eepd_checkpoint, EEPDManifest};
pub use decode::decode_entities;
pub use eval::{evaluate_eepd, evaluate_spans, EEPDEvaluation, SpanScore};
pub use loss::{combine, eepd_loss, EEPDLossConfig, LossBreakdown};
pub use model::{EEPDModel, EEPDModelConfig, EncoderConfig, ScoredSpan, Window};
pub use pseudo::pseudo_label;
pub use spans::{enumerate_spans, span_count};
pub use train::{train_eepd, EEPDTrainConfig};
