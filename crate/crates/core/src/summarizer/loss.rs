use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::AnnotatedDocument;
use crate::error::{Error, Result};
use crate::nn::{Graph, Var};

use super::generate::{generate_summary, GenerationConfig};
use super::model::Seq2SeqModel;
use super::penalty::{locate_entity, token_penalty};

/// How the entity penalty enters the loss: `hard` counts missing entities
/// on a greedy decode (no gradient); `soft` penalizes low decoder
/// confidence on entity tokens at their reference positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TpMode {
    Hard,
    Soft,
}

/// Mixing weight and penalty mode for the summarization objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarizerLossConfig {
    pub lambda: f64,
    pub tp_mode: TpMode,
}

impl Default for SummarizerLossConfig {
    fn default() -> Self {
        Self {
            lambda: 0.7,
            tp_mode: TpMode::Soft,
        }
    }
}

impl SummarizerLossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!(
                "lambda must be in [0, 1], got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Component values and their mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummarizerLossBreakdown {
    pub ce: f64,
    pub tp: f64,
    pub total: f64,
}

/// λ·CE + (1−λ)·TP.
pub fn combine(cfg: &SummarizerLossConfig, ce: f64, tp: f64) -> f64 {
    cfg.lambda * ce + (1.0 - cfg.lambda) * tp
}

/// One training sample: source tokens, reference summary tokens, and the
/// entity surfaces expected to appear in the summary.
#[derive(Debug, Clone)]
pub struct SummarizationExample {
    pub source: Vec<String>,
    pub summary: Vec<String>,
    pub entities: Vec<String>,
}

/// Examples from annotated documents, taking entity surfaces from the
/// gold summary annotation.
pub fn examples_from_docs(docs: &[AnnotatedDocument]) -> Vec<SummarizationExample> {
    docs.iter()
        .map(|doc| SummarizationExample {
            source: doc.text.tokens.clone(),
            summary: doc.summary.tokens.clone(),
            entities: doc
                .summary_entities
                .iter()
                .map(|s| doc.summary.tokens[s.b..=s.e].join(" "))
                .collect(),
        })
        .collect()
}

/// Builds the loss graph for a batch. CE is the mean per-token negative
/// log-likelihood of the reference under teacher forcing; TP follows the
/// configured mode and is averaged per example. With `rng` given, dropout
/// is active.
pub fn build_summarizer_loss(
    model: &Seq2SeqModel,
    batch: &[SummarizationExample],
    cfg: &SummarizerLossConfig,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<(Graph, Var, SummarizerLossBreakdown)> {
    cfg.validate()?;
    if batch.is_empty() {
        return Err(Error::Config("summarizer batch is empty".into()));
    }
    let mut g = Graph::new();
    let mut ce_sum: Option<Var> = None;
    let mut ce_count = 0usize;
    let mut tp_sum: Option<Var> = None;
    let soft_tp = cfg.tp_mode == TpMode::Soft && cfg.lambda < 1.0;

    for ex in batch {
        let src_ids = model.source_ids(&ex.source);
        let (tgt_input, targets) = model.teacher_ids(&ex.summary);
        let src_hidden = model.encode_source(&mut g, &src_ids, rng.as_deref_mut());
        let logits = model.decoder_logits(&mut g, src_hidden, &tgt_input, rng.as_deref_mut());
        let logp = g.log_softmax_rows(logits);

        let picks: Vec<(usize, usize)> = targets.iter().enumerate().map(|(t, &y)| (t, y)).collect();
        let picked = g.pick_entries(logp, picks);
        let sum = g.sum_all(picked);
        let neg = g.scale(sum, -1.0);
        ce_sum = Some(match ce_sum {
            Some(acc) => g.add(acc, neg),
            None => neg,
        });
        ce_count += targets.len();

        if soft_tp {
            let visible = &ex.summary[..(model.config.max_tgt_len - 1).min(ex.summary.len())];
            let mut example_tp: Option<Var> = None;
            for entity in &ex.entities {
                let term = match locate_entity(entity, visible) {
                    Some(range) => {
                        let picks: Vec<(usize, usize)> =
                            range.clone().map(|t| (t, targets[t])).collect();
                        let picked = g.pick_entries(logp, picks);
                        let mean = g.mean_all(picked);
                        let p = g.exp(mean);
                        let neg = g.scale(p, -1.0);
                        g.add_scalar(neg, 1.0)
                    }
                    None => g.constant(ndarray::Array2::from_elem((1, 1), 1.0)),
                };
                example_tp = Some(match example_tp {
                    Some(acc) => g.add(acc, term),
                    None => term,
                });
            }
            if let Some(t) = example_tp {
                tp_sum = Some(match tp_sum {
                    Some(acc) => g.add(acc, t),
                    None => t,
                });
            }
        }
    }

    let ce = {
        let sum = ce_sum.expect("non-empty batch accumulated cross-entropy");
        g.scale(sum, 1.0 / ce_count as f64)
    };
    let tp: Option<Var> = if soft_tp {
        Some(match tp_sum {
            Some(sum) => g.scale(sum, 1.0 / batch.len() as f64),
            None => g.constant(ndarray::Array2::zeros((1, 1))),
        })
    } else if cfg.tp_mode == TpMode::Hard && cfg.lambda < 1.0 {
        let value = hard_tp_mean(model, batch)?;
        Some(g.constant(ndarray::Array2::from_elem((1, 1), value)))
    } else {
        None
    };

    let total = match tp {
        Some(tp) => {
            let weighted_ce = g.scale(ce, cfg.lambda);
            let weighted_tp = g.scale(tp, 1.0 - cfg.lambda);
            g.add(weighted_ce, weighted_tp)
        }
        None => ce,
    };

    let breakdown = SummarizerLossBreakdown {
        ce: g.scalar(ce),
        tp: tp.map_or(0.0, |v| g.scalar(v)),
        total: g.scalar(total),
    };
    for (name, v) in [("ce", breakdown.ce), ("tp", breakdown.tp), ("total", breakdown.total)] {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                component: name.to_string(),
            });
        }
    }
    Ok((g, total, breakdown))
}

/// Loss values without dropout (evaluation mode).
pub fn summarizer_loss(
    model: &Seq2SeqModel,
    batch: &[SummarizationExample],
    cfg: &SummarizerLossConfig,
) -> Result<SummarizerLossBreakdown> {
    build_summarizer_loss(model, batch, cfg, None).map(|(_, _, b)| b)
}

/// Mean missing-entity count over a greedy decode of each example,
/// bounded a little past the reference length.
pub fn hard_tp_mean(model: &Seq2SeqModel, batch: &[SummarizationExample]) -> Result<f64> {
    let mut total = 0usize;
    for ex in batch {
        let gen_cfg = GenerationConfig {
            top_k: 1,
            do_sample: false,
            min_new_tokens: 0,
            max_seq_length: (ex.summary.len() + 8).min(model.config.max_tgt_len - 1),
            ..GenerationConfig::default()
        };
        let decoded = generate_summary(model, &ex.source, &gen_cfg, 0)?;
        total += token_penalty(&ex.entities, &decoded);
    }
    Ok(total as f64 / batch.len() as f64)
}
