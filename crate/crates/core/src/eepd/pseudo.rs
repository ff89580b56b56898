use rayon::prelude::*;

use crate::corpus::{AnnotatedDocument, Provenance};

use super::decode::decode_entities;
use super::model::EEPDModel;

/// Annotates documents with model-predicted entities, replacing whatever
/// entity list they carried and marking the result as machine-labeled.
/// Summaries are passed through untouched. Documents are processed in
/// parallel; output order matches input order.
pub fn pseudo_label(
    model: &EEPDModel,
    docs: &[AnnotatedDocument],
    threshold: f64,
) -> Vec<AnnotatedDocument> {
    docs.par_iter()
        .map(|doc| {
            let entities = decode_entities(&model.score_spans(&doc.text), threshold);
            AnnotatedDocument {
                id: doc.id.clone(),
                text: doc.text.clone(),
                entities,
                summary: doc.summary.clone(),
                summary_entities: doc.summary_entities.clone(),
                provenance: Provenance::Pseudo,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::sample_corpus;
    use crate::eepd::model::{EEPDModelConfig, EncoderConfig};
    use crate::nn::Vocab;

    fn tiny_model(corpus: &[AnnotatedDocument]) -> EEPDModel {
        let vocab = Vocab::build(
            corpus
                .iter()
                .flat_map(|d| d.text.tokens.iter())
                .map(|s| s.as_str()),
        );
        let config = EEPDModelConfig {
            encoder: EncoderConfig {
                d_model: 8,
                d_ff: 16,
                dropout: 0.0,
                max_len: 64,
                ..EncoderConfig::default()
            },
            max_span_len: 4,
            span_width_emb_dim: 4,
            threshold: 0.5,
        };
        EEPDModel::new(config, vocab, 5)
    }

    #[test]
    fn empty_input_gives_empty_output() {
        let corpus = sample_corpus();
        let model = tiny_model(&corpus);
        assert!(pseudo_label(&model, &[], 0.5).is_empty());
    }

    #[test]
    fn outputs_carry_pseudo_provenance() {
        let corpus = sample_corpus();
        let model = tiny_model(&corpus);
        let out = pseudo_label(&model, &corpus[..3], 0.0);
        assert_eq!(out.len(), 3);
        for (src, doc) in corpus.iter().zip(&out) {
            assert_eq!(doc.provenance, Provenance::Pseudo);
            assert_eq!(doc.id, src.id);
            assert_eq!(doc.summary, src.summary);
        }
    }

    #[test]
    fn unreachable_threshold_strips_all_entities() {
        let corpus = sample_corpus();
        let model = tiny_model(&corpus);
        let out = pseudo_label(&model, &corpus, 1.01);
        assert!(out.iter().all(|d| d.entities.is_empty()));
    }
}
