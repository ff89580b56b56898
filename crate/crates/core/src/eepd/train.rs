use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::AnnotatedDocument;
use crate::error::{Error, Result};
use crate::nn::AdamConfig;

use super::loss::{build_eepd_loss, EEPDLossConfig, LossBreakdown};
use super::model::EEPDModel;

/// Optimizer and schedule settings for entity-extractor training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EEPDTrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub max_grad_norm: f64,
    pub seed: u64,
    pub loss: EEPDLossConfig,
}

impl Default for EEPDTrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 4,
            lr: 1e-5,
            max_grad_norm: 1.0,
            seed: 0,
            loss: EEPDLossConfig::default(),
        }
    }
}

impl EEPDTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if !(self.max_grad_norm > 0.0) {
            return Err(Error::Config("gradient clip norm must be positive".into()));
        }
        self.loss.validate()
    }
}

/// Trains the model in place over shuffled mini-batches with Adam and
/// global gradient-norm clipping. Returns one averaged loss breakdown per
/// epoch. A non-finite loss aborts with the offending component named.
pub fn train_eepd(
    model: &mut EEPDModel,
    docs: &[AnnotatedDocument],
    cfg: &EEPDTrainConfig,
) -> Result<Vec<LossBreakdown>> {
    cfg.validate()?;
    if docs.is_empty() {
        return Err(Error::Config("training corpus is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let adam = AdamConfig {
        lr: cfg.lr,
        max_grad_norm: Some(cfg.max_grad_norm),
        ..AdamConfig::default()
    };
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..docs.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut sums = LossBreakdown { l1: 0.0, l2: 0.0, l3: 0.0, total: 0.0 };
        let mut n_batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&AnnotatedDocument> = chunk.iter().map(|&i| &docs[i]).collect();
            let (mut g, total, breakdown) =
                build_eepd_loss(model, &batch, &cfg.loss, Some(&mut rng))?;
            let grads = g.backward(total);
            model.store.adam_step(&grads, &adam);
            sums.l1 += breakdown.l1;
            sums.l2 += breakdown.l2;
            sums.l3 += breakdown.l3;
            sums.total += breakdown.total;
            n_batches += 1;
        }
        let scale = 1.0 / n_batches as f64;
        history.push(LossBreakdown {
            l1: sums.l1 * scale,
            l2: sums.l2 * scale,
            l3: sums.l3 * scale,
            total: sums.total * scale,
        });
    }
    Ok(history)
}
