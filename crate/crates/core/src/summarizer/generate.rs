use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{BOS, EOS, PAD, UNK};

use super::model::Seq2SeqModel;

/// Sampling settings for free-running decoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub max_seq_length: usize,
    pub min_new_tokens: usize,
    pub top_p: f64,
    pub top_k: usize,
    pub do_sample: bool,
    pub num_beams: usize,
    pub use_cache: bool,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            max_seq_length: 1024,
            min_new_tokens: 200,
            top_p: 0.9,
            top_k: 10,
            do_sample: true,
            num_beams: 1,
            use_cache: true,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(Error::Config(format!(
                "top_p must be in (0, 1], got {}",
                self.top_p
            )));
        }
        if self.top_k == 0 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        if self.min_new_tokens > self.max_seq_length {
            return Err(Error::Config(
                "min_new_tokens must not exceed max_seq_length".into(),
            ));
        }
        if self.num_beams != 1 {
            return Err(Error::Config("only single-beam decoding is supported".into()));
        }
        Ok(())
    }
}

/// Samples a free-running summary for a tokenized document. Decoding is
/// deterministic for a fixed seed. The end-of-sequence token is blocked
/// until `min_new_tokens` tokens exist; sampling is restricted to the
/// `top_k` highest-probability tokens and, within those, to the smallest
/// nucleus reaching mass `top_p`. With `do_sample` off (or `top_k` 1)
/// decoding is greedy. `use_cache` controls whether decoder keys and
/// values are reused across steps or recomputed; the output is identical.
pub fn generate_summary(
    model: &Seq2SeqModel,
    source: &[String],
    cfg: &GenerationConfig,
    seed: u64,
) -> Result<Vec<String>> {
    Ok(model.vocab.decode(&generate_ids(model, source, cfg, seed)?))
}

/// Token ids of a sampled summary, before decoding to strings. Special
/// tokens never appear in the result.
pub fn generate_ids(
    model: &Seq2SeqModel,
    source: &[String],
    cfg: &GenerationConfig,
    seed: u64,
) -> Result<Vec<usize>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let src_ids = model.source_ids(source);
    let src_hidden = model.encode_source_arr(&src_ids);
    let capacity = cfg.max_seq_length.min(model.config.max_tgt_len - 1);

    let mut cached_state = cfg.use_cache.then(|| model.start_decoder(&src_hidden));
    let mut generated: Vec<usize> = Vec::new();
    while generated.len() < capacity {
        let logits = match cached_state.as_mut() {
            Some(state) => {
                let pos = state.self_k.nrows();
                let input = if pos == 0 { BOS } else { generated[pos - 1] };
                model.step(state, pos, input)
            }
            None => replay_logits(model, &src_hidden, &generated),
        };
        let suppress_eos = generated.len() < cfg.min_new_tokens;
        let token = select_token(&logits, cfg, suppress_eos, &mut rng);
        if token == EOS {
            break;
        }
        generated.push(token);
    }
    Ok(generated)
}

/// Next-token logits recomputed over the whole prefix from scratch.
fn replay_logits(
    model: &Seq2SeqModel,
    src_hidden: &ndarray::Array2<f64>,
    generated: &[usize],
) -> Array1<f64> {
    let mut state = model.start_decoder(src_hidden);
    let mut logits = model.step(&mut state, 0, BOS);
    for (i, &id) in generated.iter().enumerate() {
        logits = model.step(&mut state, i + 1, id);
    }
    logits
}

/// Applies suppression, top-k, and nucleus filtering, then samples (or
/// takes the argmax when sampling is disabled). Ties break toward the
/// smaller token id.
fn select_token(
    logits: &Array1<f64>,
    cfg: &GenerationConfig,
    suppress_eos: bool,
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut order: Vec<usize> = (0..logits.len())
        .filter(|&id| id != PAD && id != BOS && id != UNK && !(suppress_eos && id == EOS))
        .collect();
    order.sort_by(|&a, &b| logits[b].total_cmp(&logits[a]).then(a.cmp(&b)));
    order.truncate(cfg.top_k);
    if !cfg.do_sample || order.len() == 1 {
        return order[0];
    }

    let max = logits[order[0]];
    let weights: Vec<f64> = order.iter().map(|&id| (logits[id] - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut nucleus = 0;
    let mut mass = 0.0;
    while nucleus < order.len() {
        mass += weights[nucleus] / total;
        nucleus += 1;
        if mass >= cfg.top_p {
            break;
        }
    }
    let kept = &weights[..nucleus];
    let kept_total: f64 = kept.iter().sum();
    let mut draw = rng.gen_range(0.0..kept_total);
    for (i, w) in kept.iter().enumerate() {
        if draw < *w {
            return order[i];
        }
        draw -= w;
    }
    order[nucleus - 1]
}
