//! Corpus data model: labels, tokenization, annotated documents, JSONL
//! storage, statistics, and deterministic splitting.

pub mod doc;
pub mod io;
pub mod label;
pub mod sample;
pub mod span;
pub mod split;
pub mod stats;
pub mod text;

pub use doc::{AnnotatedDocument, Provenance, Record};
pub use io::{load_corpus, retokenize_check, save_corpus, validate_corpus, ValidationWarning};
pub use label::{EntityLabel, ALL_LABELS, ENTITY_LABELS, NUM_CLASSES};
pub use sample::sample_corpus;
pub use span::EntitySpan;
pub use split::split_corpus;
pub use stats::{corpus_stats, CorpusStats};
pub use text::{tokenize, TokenizedText};
