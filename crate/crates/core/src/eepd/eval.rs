use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedDocument, EntitySpan, ENTITY_LABELS};

use super::decode::decode_entities;
use super::model::EEPDModel;

/// Exact-match precision/recall/F1 with the underlying counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpanScore {
    pub tp: usize,
    pub n_predicted: usize,
    pub n_gold: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl SpanScore {
    fn from_counts(tp: usize, n_predicted: usize, n_gold: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, n_predicted);
        let recall = ratio(tp, n_gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { tp, n_predicted, n_gold, precision, recall, f1 }
    }
}

/// Per-label scores plus the micro average over all labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EEPDEvaluation {
    pub per_label: BTreeMap<String, SpanScore>,
    pub micro: SpanScore,
}

/// Scores predicted spans against gold spans; a prediction counts only on
/// an exact (b, e, label) match.
pub fn evaluate_spans(predicted: &[Vec<EntitySpan>], gold: &[Vec<EntitySpan>]) -> EEPDEvaluation {
    assert_eq!(predicted.len(), gold.len(), "document count mismatch");
    let mut tp: BTreeMap<&str, usize> = BTreeMap::new();
    let mut n_pred: BTreeMap<&str, usize> = BTreeMap::new();
    let mut n_gold: BTreeMap<&str, usize> = BTreeMap::new();
    for (pred_doc, gold_doc) in predicted.iter().zip(gold) {
        for p in pred_doc {
            *n_pred.entry(p.label.as_str()).or_default() += 1;
            if gold_doc.iter().any(|g| g == p) {
                *tp.entry(p.label.as_str()).or_default() += 1;
            }
        }
        for g in gold_doc {
            *n_gold.entry(g.label.as_str()).or_default() += 1;
        }
    }
    let mut per_label = BTreeMap::new();
    let (mut tp_all, mut pred_all, mut gold_all) = (0, 0, 0);
    for label in ENTITY_LABELS {
        let key = label.as_str();
        let (t, p, g) = (
            tp.get(key).copied().unwrap_or(0),
            n_pred.get(key).copied().unwrap_or(0),
            n_gold.get(key).copied().unwrap_or(0),
        );
        tp_all += t;
        pred_all += p;
        gold_all += g;
        per_label.insert(key.to_string(), SpanScore::from_counts(t, p, g));
    }
    EEPDEvaluation {
        per_label,
        micro: SpanScore::from_counts(tp_all, pred_all, gold_all),
    }
}

/// Runs the model over the corpus and scores its decoded entities against
/// the gold annotation. Documents are scored in parallel; the result does
/// not depend on the schedule.
pub fn evaluate_eepd(model: &EEPDModel, docs: &[AnnotatedDocument]) -> EEPDEvaluation {
    let predicted: Vec<Vec<EntitySpan>> = docs
        .par_iter()
        .map(|doc| decode_entities(&model.score_spans(&doc.text), model.config.threshold))
        .collect();
    let gold: Vec<Vec<EntitySpan>> = docs.iter().map(|d| d.entities.clone()).collect();
    evaluate_spans(&predicted, &gold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::EntityLabel;

    fn span(b: usize, e: usize, label: EntityLabel) -> EntitySpan {
        EntitySpan { b, e, label }
    }

    #[test]
    fn perfect_predictions_score_one() {
        let gold = vec![vec![
            span(0, 1, EntityLabel::DataCompulsory),
            span(3, 3, EntityLabel::SourceDirect),
        ]];
        let eval = evaluate_spans(&gold.clone(), &gold);
        assert_eq!(eval.micro.precision, 1.0);
        assert_eq!(eval.micro.recall, 1.0);
        assert_eq!(eval.micro.f1, 1.0);
        assert_eq!(eval.per_label["data-compulsory"].f1, 1.0);
    }

    #[test]
    fn hand_counted_partial_match() {
        // 2 predictions, 1 exact match, 4 gold spans.
        let gold = vec![vec![
            span(0, 1, EntityLabel::DataCompulsory),
            span(3, 3, EntityLabel::SourceDirect),
            span(5, 6, EntityLabel::Reason),
            span(8, 8, EntityLabel::Medium),
        ]];
        let predicted = vec![vec![
            span(0, 1, EntityLabel::DataCompulsory),
            span(10, 11, EntityLabel::Reason),
        ]];
        let eval = evaluate_spans(&predicted, &gold);
        assert_eq!(eval.micro.precision, 0.5);
        assert_eq!(eval.micro.recall, 0.25);
        assert!((eval.micro.f1 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn label_swap_strictly_decreases_micro_f1() {
        let gold = vec![vec![
            span(0, 1, EntityLabel::DataCompulsory),
            span(3, 3, EntityLabel::SourceDirect),
        ]];
        let mut predicted = gold.clone();
        predicted[0][1].label = EntityLabel::Medium;
        let eval = evaluate_spans(&predicted, &gold);
        assert!(eval.micro.f1 < 1.0);
        assert_eq!(eval.micro.tp, 1);
        assert_eq!(eval.micro.n_predicted, 2);
    }

    #[test]
    fn empty_predictions_and_gold() {
        let eval = evaluate_spans(&[vec![]], &[vec![]]);
        assert_eq!(eval.micro.f1, 0.0);
        assert_eq!(eval.micro.n_gold, 0);
    }

    #[test]
    fn extent_match_with_wrong_label_is_not_correct() {
        let gold = vec![vec![span(2, 4, EntityLabel::Reason)]];
        let predicted = vec![vec![span(2, 4, EntityLabel::Medium)]];
        let eval = evaluate_spans(&predicted, &gold);
        assert_eq!(eval.micro.tp, 0);
    }
}
