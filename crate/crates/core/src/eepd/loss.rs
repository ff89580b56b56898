use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::AnnotatedDocument;
use crate::error::{Error, Result};
use crate::nn::{bind, linear, Graph, Var};

use super::model::EEPDModel;
use super::spans::enumerate_spans;

/// Weights of the joint objective and the negative-sampling ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EEPDLossConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    /// Training keeps at most this many `invalid` spans per positive span.
    pub neg_ratio: usize,
}

impl Default for EEPDLossConfig {
    fn default() -> Self {
        Self {
            alpha1: 0.5,
            alpha2: 0.25,
            alpha3: 0.25,
            neg_ratio: 5,
        }
    }
}

impl EEPDLossConfig {
    pub fn validate(&self) -> Result<()> {
        let alphas = [self.alpha1, self.alpha2, self.alpha3];
        if alphas.iter().any(|a| *a < 0.0) {
            return Err(Error::Config("loss weights must be non-negative".into()));
        }
        let sum: f64 = alphas.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "loss weights must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// Component values and their weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub total: f64,
}

/// Weighted combination of the three components.
pub fn combine(cfg: &EEPDLossConfig, l1: f64, l2: f64, l3: f64) -> f64 {
    cfg.alpha1 * l1 + cfg.alpha2 * l2 + cfg.alpha3 * l3
}

struct Accumulator {
    sum: Option<Var>,
    count: usize,
}

impl Accumulator {
    fn new() -> Self {
        Self { sum: None, count: 0 }
    }

    fn push(&mut self, g: &mut Graph, term: Var, count: usize) {
        self.sum = Some(match self.sum {
            Some(acc) => g.add(acc, term),
            None => term,
        });
        self.count += count;
    }

    fn mean(&self, g: &mut Graph) -> Option<Var> {
        self.sum.map(|s| g.scale(s, 1.0 / self.count as f64))
    }
}

/// Builds the joint loss graph over a document batch. With `rng` given
/// (training mode) dropout is active and `invalid` spans are downsampled;
/// without it, evaluation mode scores every candidate span
/// deterministically. Returns the graph, the total-loss node, and the
/// component values.
pub fn build_eepd_loss(
    model: &EEPDModel,
    docs: &[&AnnotatedDocument],
    loss_cfg: &EEPDLossConfig,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<(Graph, Var, LossBreakdown)> {
    loss_cfg.validate()?;
    let mut g = Graph::new();
    let mut l1_acc = Accumulator::new();
    let mut l3_acc = Accumulator::new();
    let mut l2_acc = Accumulator::new();

    for doc in docs {
        let gold: HashMap<(usize, usize), usize> = doc
            .entities
            .iter()
            .map(|s| ((s.b, s.e), s.label.index()))
            .collect();
        for window in model.windows(&doc.text) {
            let n = window.end - window.start;
            if n == 0 {
                continue;
            }
            let hidden = model.encode_window(&mut g, &doc.text, &window, rng.as_deref_mut());

            if loss_cfg.alpha1 > 0.0 || loss_cfg.alpha3 > 0.0 {
                let local = enumerate_spans(n, model.config.max_span_len);
                let labels: Vec<usize> = local
                    .iter()
                    .map(|&(b, e)| {
                        gold.get(&(window.start + b, window.start + e))
                            .copied()
                            .unwrap_or(0)
                    })
                    .collect();
                let selected = select_spans(&local, &labels, loss_cfg.neg_ratio, rng.as_deref_mut());
                if !selected.is_empty() {
                    let spans: Vec<(usize, usize)> =
                        selected.iter().map(|&i| local[i]).collect();
                    let targets: Vec<usize> = selected.iter().map(|&i| labels[i]).collect();
                    let reps = model.span_reps(&mut g, hidden, &spans);
                    let k = spans.len();

                    if loss_cfg.alpha1 > 0.0 {
                        let logits = linear(&mut g, &model.store, "eepd.head", reps);
                        let logp = g.log_softmax_rows(logits);
                        let picks: Vec<(usize, usize)> =
                            targets.iter().enumerate().map(|(i, &t)| (i, t)).collect();
                        let picked = g.pick_entries(logp, picks);
                        let sum = g.sum_all(picked);
                        let neg = g.scale(sum, -1.0);
                        l1_acc.push(&mut g, neg, k);
                    }
                    if loss_cfg.alpha3 > 0.0 {
                        let table = bind(&mut g, &model.store, "eepd.table");
                        let table_t = g.transpose(table);
                        let compat = g.matmul(reps, table_t);
                        let logp = g.log_softmax_rows(compat);
                        let picks: Vec<(usize, usize)> =
                            targets.iter().enumerate().map(|(i, &t)| (i, t)).collect();
                        let picked = g.pick_entries(logp, picks);
                        let sum = g.sum_all(picked);
                        let neg = g.scale(sum, -1.0);
                        l3_acc.push(&mut g, neg, k);
                    }
                }
            }

            if loss_cfg.alpha2 > 0.0 && !window.sentences.is_empty() {
                let segments: Vec<(usize, usize)> = window
                    .sentences
                    .iter()
                    .map(|&(s, e)| (s - window.start, e - window.start))
                    .collect();
                let targets = ndarray::Array2::from_shape_fn(
                    (segments.len(), 1),
                    |(i, _)| {
                        let (ss, se) = window.sentences[i];
                        let has = doc.entities.iter().any(|sp| sp.b < se && sp.e >= ss);
                        f64::from(u8::from(has))
                    },
                );
                let pooled = g.segment_mean_rows(hidden, segments.clone());
                let logits = linear(&mut g, &model.store, "eepd.sent", pooled);
                let bce = g.bce_with_logits(logits, targets);
                let sum = g.scale(bce, segments.len() as f64);
                l2_acc.push(&mut g, sum, segments.len());
            }
        }
    }

    let l1_mean = l1_acc.mean(&mut g);
    let l2_mean = l2_acc.mean(&mut g);
    let l3_mean = l3_acc.mean(&mut g);
    if l1_mean.is_none() && l2_mean.is_none() && l3_mean.is_none() {
        return Err(Error::Other("batch contains no trainable content".into()));
    }

    let mut total: Option<Var> = None;
    let add_weighted = |g: &mut Graph, term: Option<Var>, alpha: f64, total: &mut Option<Var>| {
        if let Some(t) = term {
            if alpha > 0.0 {
                let scaled = g.scale(t, alpha);
                *total = Some(match *total {
                    Some(acc) => g.add(acc, scaled),
                    None => scaled,
                });
            }
        }
    };
    add_weighted(&mut g, l1_mean, loss_cfg.alpha1, &mut total);
    add_weighted(&mut g, l2_mean, loss_cfg.alpha2, &mut total);
    add_weighted(&mut g, l3_mean, loss_cfg.alpha3, &mut total);
    let total = total.ok_or_else(|| Error::Other("all loss components disabled".into()))?;

    let value_of = |g: &Graph, v: Option<Var>| v.map_or(0.0, |v| g.scalar(v));
    let breakdown = LossBreakdown {
        l1: value_of(&g, l1_mean),
        l2: value_of(&g, l2_mean),
        l3: value_of(&g, l3_mean),
        total: g.scalar(total),
    };
    for (name, v) in [("l1", breakdown.l1), ("l2", breakdown.l2), ("l3", breakdown.l3), ("total", breakdown.total)] {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                component: name.to_string(),
            });
        }
    }
    Ok((g, total, breakdown))
}

/// Loss values for a batch without building gradients beyond the forward
/// pass; evaluation mode (no dropout, no downsampling).
pub fn eepd_loss(
    model: &EEPDModel,
    docs: &[&AnnotatedDocument],
    loss_cfg: &EEPDLossConfig,
) -> Result<LossBreakdown> {
    build_eepd_loss(model, docs, loss_cfg, None).map(|(_, _, b)| b)
}

/// Keeps every positive span and at most `neg_ratio` negatives per
/// positive (at least `neg_ratio` when no positive exists). Without an rng
/// all spans are kept.
fn select_spans(
    local: &[(usize, usize)],
    labels: &[usize],
    neg_ratio: usize,
    rng: Option<&mut ChaCha8Rng>,
) -> Vec<usize> {
    let Some(rng) = rng else {
        return (0..local.len()).collect();
    };
    let positives: Vec<usize> = (0..local.len()).filter(|&i| labels[i] != 0).collect();
    let negatives: Vec<usize> = (0..local.len()).filter(|&i| labels[i] == 0).collect();
    let keep_neg = (neg_ratio * positives.len().max(1)).min(negatives.len());
    let mut selected = positives;
    let sampled = rand::seq::index::sample(rng, negatives.len(), keep_neg);
    selected.extend(sampled.iter().map(|i| negatives[i]));
    selected.sort_unstable();
    selected
}
