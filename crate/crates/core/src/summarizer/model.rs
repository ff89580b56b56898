use ndarray::{Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::nn::{
    attention, causal_mask, dropout_mask, embed, ffn, init_attention, init_embedding, init_ffn,
    init_linear, linear, Graph, ParamStore, Var, Vocab, BOS, EOS,
};

/// Encoder-decoder architecture settings. `base` names the backbone;
/// "tiny-seq2seq" is the built-in trainable model used throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarizerModelConfig {
    pub base: String,
    pub d_model: usize,
    pub d_ff: usize,
    pub dropout: f64,
    /// Source tokens beyond this are dropped, keeping the head.
    pub max_src_len: usize,
    /// Decoder positional capacity; bounds generation length.
    pub max_tgt_len: usize,
}

impl Default for SummarizerModelConfig {
    fn default() -> Self {
        Self {
            base: "tiny-seq2seq".to_string(),
            d_model: 32,
            d_ff: 64,
            dropout: 0.1,
            max_src_len: 512,
            max_tgt_len: 1024,
        }
    }
}

impl SummarizerModelConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.d_model == 0 || self.d_ff == 0 {
            return Err(crate::Error::Config("model dimensions must be positive".into()));
        }
        if self.max_src_len == 0 || self.max_tgt_len < 2 {
            return Err(crate::Error::Config(
                "sequence capacities too small (need max_src_len ≥ 1, max_tgt_len ≥ 2)".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(crate::Error::Config(format!(
                "dropout must be in [0, 1), got {}",
                self.dropout
            )));
        }
        Ok(())
    }
}

/// Sequence-to-sequence summarizer: a single-block self-attention encoder
/// and a single-block decoder with causal self-attention, cross-attention
/// over the encoded source, and a vocabulary projection.
#[derive(Debug, Clone)]
pub struct Seq2SeqModel {
    pub config: SummarizerModelConfig,
    pub vocab: Vocab,
    pub store: ParamStore,
}

impl Seq2SeqModel {
    pub fn new(config: SummarizerModelConfig, vocab: Vocab, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = ParamStore::new();
        let d = config.d_model;
        init_embedding(&mut store, &mut rng, "sum.src", vocab.len(), config.max_src_len, d);
        init_attention(&mut store, &mut rng, "sum.enc.att", d);
        init_ffn(&mut store, &mut rng, "sum.enc.ff", d, config.d_ff);
        init_embedding(&mut store, &mut rng, "sum.tgt", vocab.len(), config.max_tgt_len, d);
        init_attention(&mut store, &mut rng, "sum.dec.att", d);
        init_attention(&mut store, &mut rng, "sum.dec.cross", d);
        init_ffn(&mut store, &mut rng, "sum.dec.ff", d, config.d_ff);
        init_linear(&mut store, &mut rng, "sum.out", d, vocab.len());
        Self { config, vocab, store }
    }

    /// Source token ids, truncated head-first to the encoder capacity.
    pub fn source_ids(&self, tokens: &[String]) -> Vec<usize> {
        tokens
            .iter()
            .take(self.config.max_src_len)
            .map(|t| self.vocab.id(t))
            .collect()
    }

    /// Teacher-forcing pair for a reference summary: decoder input
    /// `[BOS, y₁, …, yₜ₋₁]` and targets `[y₁, …, yₜ, EOS]`. Summaries
    /// longer than the decoder capacity are truncated head-first.
    pub fn teacher_ids(&self, summary: &[String]) -> (Vec<usize>, Vec<usize>) {
        let ids: Vec<usize> = summary
            .iter()
            .take(self.config.max_tgt_len - 1)
            .map(|t| self.vocab.id(t))
            .collect();
        let mut input = Vec::with_capacity(ids.len() + 1);
        input.push(BOS);
        input.extend(&ids);
        let mut targets = ids;
        targets.push(EOS);
        (input, targets)
    }

    /// Encodes source ids to hidden states (n_src × d) in the graph.
    pub fn encode_source(
        &self,
        g: &mut Graph,
        ids: &[usize],
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Var {
        let mut x = embed(g, &self.store, "sum.src", ids);
        if let Some(rng) = dropout_rng {
            let mask = dropout_mask(rng, ids.len(), self.config.d_model, self.config.dropout);
            let mask = g.constant(mask);
            x = g.mul_elem(x, mask);
        }
        let att = attention(g, &self.store, "sum.enc.att", x, x, None);
        let x = g.add(x, att);
        let ff = ffn(g, &self.store, "sum.enc.ff", x);
        g.add(x, ff)
    }

    /// Teacher-forced decoder hidden states (T × d) over the encoded
    /// source, before the vocabulary projection.
    pub fn decoder_hidden(
        &self,
        g: &mut Graph,
        src_hidden: Var,
        tgt_input: &[usize],
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Var {
        let mut x = embed(g, &self.store, "sum.tgt", tgt_input);
        if let Some(rng) = dropout_rng {
            let mask = dropout_mask(rng, tgt_input.len(), self.config.d_model, self.config.dropout);
            let mask = g.constant(mask);
            x = g.mul_elem(x, mask);
        }
        let mask = causal_mask(tgt_input.len());
        let att = attention(g, &self.store, "sum.dec.att", x, x, Some(&mask));
        let x = g.add(x, att);
        let cross = attention(g, &self.store, "sum.dec.cross", x, src_hidden, None);
        let x = g.add(x, cross);
        let ff = ffn(g, &self.store, "sum.dec.ff", x);
        g.add(x, ff)
    }

    /// Teacher-forced decoder logits (T × vocab) over the encoded source.
    pub fn decoder_logits(
        &self,
        g: &mut Graph,
        src_hidden: Var,
        tgt_input: &[usize],
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Var {
        let x = self.decoder_hidden(g, src_hidden, tgt_input, dropout_rng);
        linear(g, &self.store, "sum.out", x)
    }

    /// Inference-mode source encoding as a plain array (no graph).
    pub fn encode_source_arr(&self, ids: &[usize]) -> Array2<f64> {
        let x = self.embed_arr("sum.src", ids, 0);
        let att = self.attention_arr("sum.enc.att", &x, &x);
        let x = x + att;
        let ff = self.ffn_arr("sum.enc.ff", &x);
        x + ff
    }

    /// Starts an incremental decoding state over an encoded source.
    pub fn start_decoder(&self, src_hidden: &Array2<f64>) -> DecoderState {
        let d = self.config.d_model;
        DecoderState {
            cross_k: src_hidden.dot(self.store.get("sum.dec.cross.wk")),
            cross_v: src_hidden.dot(self.store.get("sum.dec.cross.wv")),
            self_k: Array2::zeros((0, d)),
            self_v: Array2::zeros((0, d)),
        }
    }

    /// Feeds one decoder input token at position `pos` (0-based) and
    /// returns next-token logits. The state accumulates self-attention
    /// keys and values, so positions must be fed in order.
    pub fn step(&self, state: &mut DecoderState, pos: usize, token_id: usize) -> Array1<f64> {
        assert_eq!(state.self_k.nrows(), pos, "decoder positions fed out of order");
        assert!(pos < self.config.max_tgt_len, "decoder capacity exceeded");
        let d = self.config.d_model;
        let scale = 1.0 / (d as f64).sqrt();
        let x = self.embed_arr("sum.tgt", &[token_id], pos);

        let q = x.dot(self.store.get("sum.dec.att.wq"));
        let k_new = x.dot(self.store.get("sum.dec.att.wk"));
        let v_new = x.dot(self.store.get("sum.dec.att.wv"));
        state.self_k.append(Axis(0), k_new.view()).expect("key append");
        state.self_v.append(Axis(0), v_new.view()).expect("value append");
        let scores = q.dot(&state.self_k.t()) * scale;
        let probs = softmax_rows_arr(&scores);
        let mixed = probs.dot(&state.self_v);
        let att = mixed.dot(self.store.get("sum.dec.att.wo"));
        let x = x + att;

        let q = x.dot(self.store.get("sum.dec.cross.wq"));
        let scores = q.dot(&state.cross_k.t()) * scale;
        let probs = softmax_rows_arr(&scores);
        let mixed = probs.dot(&state.cross_v);
        let cross = mixed.dot(self.store.get("sum.dec.cross.wo"));
        let x = x + cross;

        let ff = self.ffn_arr("sum.dec.ff", &x);
        let x = x + ff;

        let logits =
            x.dot(self.store.get("sum.out.w")) + self.store.get("sum.out.b");
        logits.remove_axis(Axis(0))
    }

    fn embed_arr(&self, prefix: &str, ids: &[usize], pos_offset: usize) -> Array2<f64> {
        let emb = self.store.get(&format!("{prefix}.emb"));
        let pos = self.store.get(&format!("{prefix}.pos"));
        let d = emb.ncols();
        let mut out = Array2::zeros((ids.len(), d));
        for (i, &id) in ids.iter().enumerate() {
            let row = &emb.row(id) + &pos.row(pos_offset + i);
            out.row_mut(i).assign(&row);
        }
        out
    }

    fn attention_arr(&self, prefix: &str, x_q: &Array2<f64>, x_kv: &Array2<f64>) -> Array2<f64> {
        let d = x_q.ncols();
        let q = x_q.dot(self.store.get(&format!("{prefix}.wq")));
        let k = x_kv.dot(self.store.get(&format!("{prefix}.wk")));
        let v = x_kv.dot(self.store.get(&format!("{prefix}.wv")));
        let scores = q.dot(&k.t()) * (1.0 / (d as f64).sqrt());
        let probs = softmax_rows_arr(&scores);
        probs.dot(&v).dot(self.store.get(&format!("{prefix}.wo")))
    }

    fn ffn_arr(&self, prefix: &str, x: &Array2<f64>) -> Array2<f64> {
        let h = x.dot(self.store.get(&format!("{prefix}.w1")))
            + self.store.get(&format!("{prefix}.b1"));
        let h = h.mapv(|v| v.max(0.0));
        h.dot(self.store.get(&format!("{prefix}.w2"))) + self.store.get(&format!("{prefix}.b2"))
    }
}

/// Incremental decoding state: projected source keys/values plus the
/// growing self-attention cache.
#[derive(Debug, Clone)]
pub struct DecoderState {
    pub cross_k: Array2<f64>,
    pub cross_v: Array2<f64>,
    pub self_k: Array2<f64>,
    pub self_v: Array2<f64>,
}

fn softmax_rows_arr(a: &Array2<f64>) -> Array2<f64> {
    let mut out = a.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|x| (x - max).exp());
        let sum: f64 = row.sum();
        row.mapv_inplace(|x| x / sum);
    }
    out
}
