use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::doc::AnnotatedDocument;
use super::label::EntityLabel;

/// Aggregate statistics over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_documents: usize,
    pub n_sentences: usize,
    pub mean_tokens_per_document: f64,
    pub mean_tokens_per_summary: f64,
    pub document_label_counts: BTreeMap<EntityLabel, usize>,
    pub summary_label_counts: BTreeMap<EntityLabel, usize>,
    pub total_document_entities: usize,
    pub total_summary_entities: usize,
    pub entities_per_summary: f64,
}

/// Tallies counts over a non-empty corpus. The entities-per-summary mean is
/// total summary entities divided by document count.
pub fn corpus_stats(docs: &[AnnotatedDocument]) -> Result<CorpusStats> {
    if docs.is_empty() {
        return Err(Error::Other("corpus is empty".to_string()));
    }
    let n = docs.len();
    let mut n_sentences = 0usize;
    let mut doc_tokens = 0usize;
    let mut summary_tokens = 0usize;
    let mut document_label_counts: BTreeMap<EntityLabel, usize> = BTreeMap::new();
    let mut summary_label_counts: BTreeMap<EntityLabel, usize> = BTreeMap::new();
    let mut total_document_entities = 0usize;
    let mut total_summary_entities = 0usize;

    for doc in docs {
        n_sentences += doc.text.sentences.len();
        doc_tokens += doc.text.n_tokens();
        summary_tokens += doc.summary.n_tokens();
        for span in &doc.entities {
            *document_label_counts.entry(span.label).or_insert(0) += 1;
            total_document_entities += 1;
        }
        for span in &doc.summary_entities {
            *summary_label_counts.entry(span.label).or_insert(0) += 1;
            total_summary_entities += 1;
        }
    }

    Ok(CorpusStats {
        n_documents: n,
        n_sentences,
        mean_tokens_per_document: doc_tokens as f64 / n as f64,
        mean_tokens_per_summary: summary_tokens as f64 / n as f64,
        document_label_counts,
        summary_label_counts,
        total_document_entities,
        total_summary_entities,
        entities_per_summary: total_summary_entities as f64 / n as f64,
    })
}
