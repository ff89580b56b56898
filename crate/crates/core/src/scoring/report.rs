use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bleu::bleu_n;
use super::embed::{embedding_similarity, CharNgramEncoder, TokenEncoder};
use super::meteor::meteor;
use super::rewards::EntityExtractor;
use super::rouge::{rouge_l, rouge_n};

/// One evaluation item: generated and reference summaries as token
/// sequences, plus the reference's gold entity surfaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPair {
    pub generated: Vec<String>,
    pub reference: Vec<String>,
    pub gold_entities: Vec<String>,
}

/// Offline quality metrics averaged over an evaluation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub bleu1: f64,
    pub bleu2: f64,
    pub bleu3: f64,
    pub bleu4: f64,
    pub meteor: f64,
    pub embedding_similarity: f64,
    pub entities_per_summary: f64,
    pub length_deviation: f64,
    pub n_pairs: usize,
}

struct PairMetrics {
    values: [f64; 11],
}

fn score_pair(
    pair: &EvalPair,
    extractor: &dyn EntityExtractor,
    encoder: &dyn TokenEncoder,
) -> PairMetrics {
    let g = &pair.generated;
    let r = &pair.reference;
    let max_len = g.len().max(r.len()) as f64;
    let len_dev = if max_len == 0.0 {
        0.0
    } else {
        (g.len() as f64 - r.len() as f64) / max_len
    };
    PairMetrics {
        values: [
            rouge_n(g, r, 1).f,
            rouge_n(g, r, 2).f,
            rouge_l(g, r).f,
            bleu_n(g, r, 1),
            bleu_n(g, r, 2),
            bleu_n(g, r, 3),
            bleu_n(g, r, 4),
            meteor(g, r),
            embedding_similarity(g, r, encoder),
            extractor.extract(g).len() as f64,
            len_dev,
        ],
    }
}

/// Averages all metrics over the pairs, sharding across threads. The
/// extractor supplies entity counts on generated summaries; the default
/// character n-gram encoder backs the embedding similarity.
pub fn evaluate_summaries(
    pairs: &[EvalPair],
    extractor: &dyn EntityExtractor,
) -> Result<MetricsReport> {
    evaluate_summaries_with(pairs, extractor, &CharNgramEncoder::default())
}

pub fn evaluate_summaries_with(
    pairs: &[EvalPair],
    extractor: &dyn EntityExtractor,
    encoder: &dyn TokenEncoder,
) -> Result<MetricsReport> {
    if pairs.is_empty() {
        return Err(Error::Other("no pairs to evaluate".to_string()));
    }
    let partials: Vec<PairMetrics> = pairs
        .par_iter()
        .map(|p| score_pair(p, extractor, encoder))
        .collect();
    let n = pairs.len() as f64;
    let mut sums = [0.0f64; 11];
    for p in &partials {
        for (s, v) in sums.iter_mut().zip(p.values.iter()) {
            *s += v;
        }
    }
    for s in sums.iter_mut() {
        *s /= n;
    }
    Ok(MetricsReport {
        rouge1: sums[0],
        rouge2: sums[1],
        rouge_l: sums[2],
        bleu1: sums[3],
        bleu2: sums[4],
        bleu3: sums[5],
        bleu4: sums[6],
        meteor: sums[7],
        embedding_similarity: sums[8],
        entities_per_summary: sums[9],
        length_deviation: sums[10],
        n_pairs: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::rewards::{FixedExtractor, SurfaceMatchExtractor};

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn empty_list_is_an_error() {
        let ex = FixedExtractor(vec![]);
        assert!(evaluate_summaries(&[], &ex).is_err());
    }

    #[test]
    fn perfect_pairs_score_one_and_zero_deviation() {
        let s = toks(&["we", "collect", "usage", "data"]);
        let pairs = vec![
            EvalPair { generated: s.clone(), reference: s.clone(), gold_entities: vec![] },
            EvalPair { generated: s.clone(), reference: s.clone(), gold_entities: vec![] },
        ];
        let ex = FixedExtractor(vec![]);
        let m = evaluate_summaries(&pairs, &ex).unwrap();
        assert!((m.rouge1 - 1.0).abs() < 1e-12);
        assert!((m.rouge2 - 1.0).abs() < 1e-12);
        assert!((m.rouge_l - 1.0).abs() < 1e-12);
        for b in [m.bleu1, m.bleu2, m.bleu3, m.bleu4] {
            assert!((b - 1.0).abs() < 1e-12);
        }
        assert!((m.meteor - 1.0).abs() < 1e-12);
        assert_eq!(m.length_deviation, 0.0);
        assert_eq!(m.n_pairs, 2);
    }

    #[test]
    fn golden_single_pair_values() {
        // the cat sat vs the cat: candidate longer, no brevity penalty
        let pairs = vec![EvalPair {
            generated: toks(&["the", "cat", "sat"]),
            reference: toks(&["the", "cat"]),
            gold_entities: vec![],
        }];
        let ex = FixedExtractor(vec![]);
        let m = evaluate_summaries(&pairs, &ex).unwrap();
        assert!((m.bleu1 - 2.0 / 3.0).abs() < 1e-9);
        // bigrams: the-cat matches; 1 of 2 candidate bigrams
        let bleu2 = (2.0f64 / 3.0 * 1.0 / 2.0).sqrt();
        assert!((m.bleu2 - bleu2).abs() < 1e-9);
        // trigram match impossible against a 2-token reference
        assert_eq!(m.bleu3, 0.0);
        assert_eq!(m.bleu4, 0.0);
        // rouge-l: lcs 2, P=2/3, R=1
        assert!((m.rouge_l - 0.8).abs() < 1e-9);
        // signed deviation (3-2)/3
        assert!((m.length_deviation - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn entity_counts_average_over_generated_summaries() {
        let pairs = vec![
            EvalPair {
                generated: toks(&["collects", "email", "address", "and", "cookies"]),
                reference: toks(&["collects", "email", "address"]),
                gold_entities: vec!["email address".to_string(), "cookies".to_string()],
            },
            EvalPair {
                generated: toks(&["nothing", "matches", "here"]),
                reference: toks(&["collects", "data"]),
                gold_entities: vec!["data".to_string()],
            },
        ];
        let gold: Vec<String> = pairs
            .iter()
            .flat_map(|p| p.gold_entities.iter().cloned())
            .collect();
        let ex = SurfaceMatchExtractor { gold };
        let m = evaluate_summaries(&pairs, &ex).unwrap();
        // pair 1 yields two surfaces, pair 2 none
        assert!((m.entities_per_summary - 1.0).abs() < 1e-12);
    }

    #[test]
    fn averaging_is_order_independent() {
        let a = EvalPair {
            generated: toks(&["a", "b", "c"]),
            reference: toks(&["a", "b"]),
            gold_entities: vec![],
        };
        let b = EvalPair {
            generated: toks(&["x", "y"]),
            reference: toks(&["x", "y", "z"]),
            gold_entities: vec![],
        };
        let ex = FixedExtractor(vec![]);
        let m1 = evaluate_summaries(&[a.clone(), b.clone()], &ex).unwrap();
        let m2 = evaluate_summaries(&[b, a], &ex).unwrap();
        assert!((m1.rouge_l - m2.rouge_l).abs() < 1e-12);
        assert!((m1.bleu4 - m2.bleu4).abs() < 1e-12);
        assert!((m1.length_deviation - m2.length_deviation).abs() < 1e-12);
    }
}
