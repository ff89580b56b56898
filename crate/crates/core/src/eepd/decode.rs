use crate::corpus::{tokenize, EntityLabel, EntitySpan};
use crate::scoring::EntityExtractor;

use super::model::{EEPDModel, ScoredSpan};

/// Turns per-span label distributions into a non-overlapping entity set.
///
/// A span is a candidate when its argmax label is a real entity class and
/// that probability reaches `threshold`. Candidates are taken greedily by
/// descending probability (ties: smaller `b`, then smaller `e`); any span
/// overlapping an already-selected one is dropped. The result is sorted
/// by start position.
pub fn decode_entities(spans: &[ScoredSpan], threshold: f64) -> Vec<EntitySpan> {
    let mut candidates: Vec<(f64, EntitySpan)> = spans
        .iter()
        .filter_map(|s| {
            let (idx, &p) = s
                .probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))?;
            let label = EntityLabel::from_index(idx)?;
            (label.is_entity() && p >= threshold).then_some((
                p,
                EntitySpan {
                    b: s.b,
                    e: s.e,
                    label,
                },
            ))
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.b.cmp(&b.1.b))
            .then(a.1.e.cmp(&b.1.e))
    });
    let mut selected: Vec<EntitySpan> = Vec::new();
    for (_, span) in candidates {
        if !selected.iter().any(|s| s.overlaps(&span)) {
            selected.push(span);
        }
    }
    selected.sort();
    selected
}

/// A trained span detector doubles as the entity extractor behind the
/// entity reward: generated tokens are retokenized, scored, decoded at
/// the model's threshold, and returned as surface strings.
impl EntityExtractor for EEPDModel {
    fn extract(&self, tokens: &[String]) -> Vec<String> {
        let text = tokenize(&tokens.join(" "));
        decode_entities(&self.score_spans(&text), self.config.threshold)
            .iter()
            .filter_map(|sp| text.tokens.get(sp.b..=sp.e).map(|t| t.join(" ")))
            .collect()
    }
}
