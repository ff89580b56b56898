use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::{linear, xavier, Graph, Var, BOS};
use crate::summarizer::Seq2SeqModel;

pub const VALUE_W: &str = "sum.value.w";
pub const VALUE_B: &str = "sum.value.b";

/// A summarization model acting as an RL policy, extended with a scalar
/// value head on the decoder trunk. The head's parameters live in the
/// same store as the rest of the model, so one optimizer step updates
/// policy and value function together, and saved checkpoints keep the
/// head and remain loadable as plain summarizers.
#[derive(Debug, Clone)]
pub struct PolicyModel {
    pub model: Seq2SeqModel,
}

impl PolicyModel {
    /// Wraps a trained summarizer, adding a freshly initialized value
    /// head unless the checkpoint already carries one.
    pub fn from_summarizer(mut model: Seq2SeqModel, seed: u64) -> Self {
        if !model.store.contains(VALUE_W) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = model.config.d_model;
            model.store.insert(VALUE_W, xavier(&mut rng, d, 1));
            model.store.insert(VALUE_B, Array2::zeros((1, 1)));
        }
        Self { model }
    }

    /// Builds the teacher-forced forward pass over one prompt/response
    /// pair: per-token log-probabilities of the response tokens and the
    /// value estimates at each position, both as (T, 1) graph nodes.
    pub fn response_forward(
        &self,
        g: &mut Graph,
        src_ids: &[usize],
        response_ids: &[usize],
    ) -> Result<(Var, Var)> {
        let input = decoder_input(&self.model, response_ids)?;
        let src_hidden = self.model.encode_source(g, src_ids, None);
        let hidden = self.model.decoder_hidden(g, src_hidden, &input, None);
        let logits = linear(g, &self.model.store, "sum.out", hidden);
        let logp = g.log_softmax_rows(logits);
        let picked = g.pick_entries(
            logp,
            response_ids.iter().enumerate().map(|(t, &id)| (t, id)).collect(),
        );
        let values = linear(g, &self.model.store, "sum.value", hidden);
        Ok((picked, values))
    }

    /// Evaluates log-probabilities and values for a response without
    /// keeping the graph.
    pub fn logp_and_values(
        &self,
        source: &[String],
        response_ids: &[usize],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let src_ids = self.model.source_ids(source);
        let mut g = Graph::new();
        let (logp, values) = self.response_forward(&mut g, &src_ids, response_ids)?;
        Ok((column(&g, logp), column(&g, values)))
    }
}

/// Per-token log-probabilities of a response under any summarization
/// model (used for the frozen reference, which has no value head).
pub fn response_logp(
    model: &Seq2SeqModel,
    source: &[String],
    response_ids: &[usize],
) -> Result<Vec<f64>> {
    let input = decoder_input(model, response_ids)?;
    let src_ids = model.source_ids(source);
    let mut g = Graph::new();
    let src_hidden = model.encode_source(&mut g, &src_ids, None);
    let logits = model.decoder_logits(&mut g, src_hidden, &input, None);
    let logp = g.log_softmax_rows(logits);
    let picked = g.pick_entries(
        logp,
        response_ids.iter().enumerate().map(|(t, &id)| (t, id)).collect(),
    );
    Ok(column(&g, picked))
}

/// Decoder input `[BOS, y_1, ..., y_{T-1}]` for a sampled response.
fn decoder_input(model: &Seq2SeqModel, response_ids: &[usize]) -> Result<Vec<usize>> {
    if response_ids.is_empty() {
        return Err(Error::Dimension("response is empty".into()));
    }
    if response_ids.len() > model.config.max_tgt_len - 1 {
        return Err(Error::Dimension(format!(
            "response of {} tokens exceeds decoder capacity {}",
            response_ids.len(),
            model.config.max_tgt_len - 1
        )));
    }
    let mut input = Vec::with_capacity(response_ids.len());
    input.push(BOS);
    input.extend(&response_ids[..response_ids.len() - 1]);
    Ok(input)
}

fn column(g: &Graph, v: Var) -> Vec<f64> {
    g.value(v).column(0).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{sha256_params, Vocab};
    use crate::summarizer::{generate_ids, GenerationConfig, SummarizerModelConfig};

    fn tiny_policy() -> PolicyModel {
        let vocab = Vocab::build(
            ["we", "collect", "email", "data", "your", "share", "use"]
                .into_iter(),
        );
        let config = SummarizerModelConfig {
            d_model: 8,
            d_ff: 16,
            dropout: 0.0,
            max_src_len: 32,
            max_tgt_len: 16,
            ..Default::default()
        };
        PolicyModel::from_summarizer(Seq2SeqModel::new(config, vocab, 3), 7)
    }

    #[test]
    fn value_head_is_added_once() {
        let policy = tiny_policy();
        assert!(policy.model.store.contains(VALUE_W));
        assert!(policy.model.store.contains(VALUE_B));
        let digest = sha256_params(&policy.model.store);
        let rewrapped = PolicyModel::from_summarizer(policy.model.clone(), 99);
        assert_eq!(sha256_params(&rewrapped.model.store), digest);
    }

    #[test]
    fn logp_matches_reference_helper_on_same_weights() {
        let policy = tiny_policy();
        let source: Vec<String> = ["we", "collect", "your", "email"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let cfg = GenerationConfig {
            max_seq_length: 6,
            min_new_tokens: 3,
            ..Default::default()
        };
        let ids = generate_ids(&policy.model, &source, &cfg, 5).unwrap();
        assert!(!ids.is_empty());
        let (logp, values) = policy.logp_and_values(&source, &ids).unwrap();
        let ref_logp = response_logp(&policy.model, &source, &ids).unwrap();
        assert_eq!(logp.len(), ids.len());
        assert_eq!(values.len(), ids.len());
        for (a, b) in logp.iter().zip(&ref_logp) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(logp.iter().all(|l| *l < 0.0));
    }

    #[test]
    fn sampled_tokens_have_sane_probabilities() {
        let policy = tiny_policy();
        let source: Vec<String> = ["share", "data"].iter().map(|s| s.to_string()).collect();
        let ids = vec![4, 5, 6];
        let (logp, _) = policy.logp_and_values(&source, &ids).unwrap();
        let vocab_size = policy.model.vocab.len() as f64;
        for l in logp {
            assert!(l.is_finite());
            assert!(l > -vocab_size.ln() * 8.0);
        }
    }

    #[test]
    fn empty_and_oversized_responses_are_rejected() {
        let policy = tiny_policy();
        let source: Vec<String> = vec!["we".to_string()];
        assert!(policy.logp_and_values(&source, &[]).is_err());
        let too_long = vec![4usize; policy.model.config.max_tgt_len];
        assert!(policy.logp_and_values(&source, &too_long).is_err());
    }
}
