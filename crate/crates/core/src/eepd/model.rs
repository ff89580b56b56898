use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{TokenizedText, NUM_CLASSES};
use crate::nn::{
    attention, embed, ffn, init_attention, init_embedding, init_ffn, init_linear, linear,
    dropout_mask, gaussian, Graph, ParamStore, Var, Vocab,
};

use super::spans::enumerate_spans;

/// Text encoder settings. `encoder` names the backbone; "tiny" is the
/// built-in trainable encoder used throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub encoder: String,
    pub d_model: usize,
    pub d_ff: usize,
    pub dropout: f64,
    pub max_len: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            encoder: "tiny".to_string(),
            d_model: 32,
            d_ff: 64,
            dropout: 0.2,
            max_len: 512,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.max_len == 0 {
            return Err(crate::Error::Config("max_len must be at least 1".into()));
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

/// Span-detector architecture settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EEPDModelConfig {
    pub encoder: EncoderConfig,
    pub max_span_len: usize,
    pub span_width_emb_dim: usize,
    /// Decoding probability threshold.
    pub threshold: f64,
}

impl Default for EEPDModelConfig {
    fn default() -> Self {
        Self {
            encoder: EncoderConfig::default(),
            max_span_len: 10,
            span_width_emb_dim: 300,
            threshold: 0.5,
        }
    }
}

impl EEPDModelConfig {
    pub fn span_rep_dim(&self) -> usize {
        2 * self.encoder.d_model + self.span_width_emb_dim
    }

    pub fn validate(&self) -> crate::Result<()> {
        self.encoder.validate()?;
        if self.max_span_len == 0 {
            return Err(crate::Error::Config("max_span_len must be at least 1".into()));
        }
        if self.span_width_emb_dim == 0 {
            return Err(crate::Error::Config(
                "span_width_emb_dim must be at least 1".into(),
            ));
        }
        if !self.threshold.is_finite() {
            return Err(crate::Error::Config("threshold must be finite".into()));
        }
        Ok(())
    }
}

/// A contiguous token range fed to the encoder in one pass, with the
/// sentence intervals it contains (all indices global to the document).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub end: usize,
    pub sentences: Vec<(usize, usize)>,
}

/// A candidate span with its label distribution.
#[derive(Debug, Clone)]
pub struct ScoredSpan {
    pub b: usize,
    pub e: usize,
    pub probs: Vec<f64>,
}

/// Span-based entity detector: tiny bidirectional encoder, width-embedded
/// span representations, a linear label head, a sentence identification
/// head, and a contrastive label table.
#[derive(Debug, Clone)]
pub struct EEPDModel {
    pub config: EEPDModelConfig,
    pub vocab: Vocab,
    pub store: ParamStore,
}

impl EEPDModel {
    /// Initializes all parameters from the seed.
    pub fn new(config: EEPDModelConfig, vocab: Vocab, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = ParamStore::new();
        let d = config.encoder.d_model;
        init_embedding(
            &mut store,
            &mut rng,
            "eepd.enc",
            vocab.len(),
            config.encoder.max_len,
            d,
        );
        init_attention(&mut store, &mut rng, "eepd.enc.att", d);
        init_ffn(&mut store, &mut rng, "eepd.enc.ff", d, config.encoder.d_ff);
        store.insert(
            "eepd.width",
            gaussian(&mut rng, config.max_span_len, config.span_width_emb_dim, 0.02),
        );
        init_linear(
            &mut store,
            &mut rng,
            "eepd.head",
            config.span_rep_dim(),
            NUM_CLASSES,
        );
        init_linear(&mut store, &mut rng, "eepd.sent", d, 1);
        store.insert(
            "eepd.table",
            gaussian(&mut rng, NUM_CLASSES, config.span_rep_dim(), 0.02),
        );
        Self {
            config,
            vocab,
            store,
        }
    }

    /// Splits a document into encoder windows: sentences are packed
    /// greedily up to `max_len` tokens; a sentence longer than `max_len`
    /// is chunked, each chunk standing as its own window.
    pub fn windows(&self, text: &TokenizedText) -> Vec<Window> {
        pack_windows(&text.sentences, self.config.encoder.max_len)
    }

    /// Encodes tokens `window.start..window.end`, returning hidden states
    /// (window length × d). Dropout masks are sampled from `dropout_rng`
    /// when given (training mode); pass `None` for deterministic eval.
    pub fn encode_window(
        &self,
        g: &mut Graph,
        text: &TokenizedText,
        window: &Window,
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Var {
        let ids: Vec<usize> = text.tokens[window.start..window.end]
            .iter()
            .map(|t| self.vocab.id(t))
            .collect();
        let d = self.config.encoder.d_model;
        let mut x = embed(g, &self.store, "eepd.enc", &ids);
        if let Some(rng) = dropout_rng {
            let p = self.config.encoder.dropout;
            let mask = g.constant(dropout_mask(rng, ids.len(), d, p));
            x = g.mul_elem(x, mask);
        }
        let att = attention(g, &self.store, "eepd.enc.att", x, x, None);
        let x = g.add(x, att);
        let ff = ffn(g, &self.store, "eepd.enc.ff", x);
        g.add(x, ff)
    }

    /// Builds span representations concat(h_b, h_e, width_emb) for local
    /// spans over window hidden states.
    pub fn span_reps(&self, g: &mut Graph, hidden: Var, spans: &[(usize, usize)]) -> Var {
        assert!(!spans.is_empty(), "span_reps on empty span list");
        let b_idx: Vec<usize> = spans.iter().map(|s| s.0).collect();
        let e_idx: Vec<usize> = spans.iter().map(|s| s.1).collect();
        let w_idx: Vec<usize> = spans.iter().map(|s| s.1 - s.0).collect();
        let hb = g.rows(hidden, b_idx);
        let he = g.rows(hidden, e_idx);
        let width = crate::nn::bind(g, &self.store, "eepd.width");
        let wrows = g.rows(width, w_idx);
        let boundary = g.concat_cols(hb, he);
        g.concat_cols(boundary, wrows)
    }

    /// Label distributions for every candidate span of a document, in
    /// enumeration order per window. Deterministic (no dropout).
    pub fn score_spans(&self, text: &TokenizedText) -> Vec<ScoredSpan> {
        let mut out = Vec::new();
        for window in self.windows(text) {
            let n = window.end - window.start;
            if n == 0 {
                continue;
            }
            let local = enumerate_spans(n, self.config.max_span_len);
            let mut g = Graph::new();
            let hidden = self.encode_window(&mut g, text, &window, None);
            let reps = self.span_reps(&mut g, hidden, &local);
            let logits = linear(&mut g, &self.store, "eepd.head", reps);
            let probs = g.softmax_rows(logits);
            let probs = g.value(probs);
            for (i, &(b, e)) in local.iter().enumerate() {
                out.push(ScoredSpan {
                    b: window.start + b,
                    e: window.start + e,
                    probs: probs.row(i).to_vec(),
                });
            }
        }
        out
    }

    /// The contrastive label distribution P(y_k | s) = softmax over the
    /// span representation's dot products with the label table rows.
    pub fn contrastive_probability(
        s: &Array2<f64>,
        table: &Array2<f64>,
    ) -> crate::Result<Vec<f64>> {
        if s.len() != table.ncols() {
            return Err(crate::Error::Dimension(format!(
                "span representation dim {} does not match label table dim {}",
                s.len(),
                table.ncols()
            )));
        }
        let scores: Vec<f64> = table
            .rows()
            .into_iter()
            .map(|y| y.iter().zip(s.iter()).map(|(a, b)| a * b).sum())
            .collect();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|x| (x - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        Ok(exps.into_iter().map(|x| x / sum).collect())
    }
}

fn pack_windows(sentences: &[(usize, usize)], max_len: usize) -> Vec<Window> {
    let mut windows = Vec::new();
    let mut current: Option<Window> = None;
    for &(s, e) in sentences {
        let len = e - s;
        if len > max_len {
            if let Some(w) = current.take() {
                windows.push(w);
            }
            let mut chunk_start = s;
            while chunk_start < e {
                let chunk_end = (chunk_start + max_len).min(e);
                windows.push(Window {
                    start: chunk_start,
                    end: chunk_end,
                    sentences: vec![(chunk_start, chunk_end)],
                });
                chunk_start = chunk_end;
            }
            continue;
        }
        let fits = current.as_ref().is_some_and(|w| e - w.start <= max_len);
        if fits {
            let w = current.as_mut().expect("fits implies current");
            w.end = e;
            w.sentences.push((s, e));
        } else {
            if let Some(w) = current.take() {
                windows.push(w);
            }
            current = Some(Window {
                start: s,
                end: e,
                sentences: vec![(s, e)],
            });
        }
    }
    if let Some(w) = current {
        windows.push(w);
    }
    windows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;
    use ndarray::array;

    fn tiny_config() -> EEPDModelConfig {
        EEPDModelConfig {
            encoder: EncoderConfig {
                d_model: 8,
                d_ff: 16,
                dropout: 0.0,
                max_len: 32,
                ..EncoderConfig::default()
            },
            max_span_len: 4,
            span_width_emb_dim: 6,
            threshold: 0.5,
        }
    }

    fn model() -> EEPDModel {
        let vocab = Vocab::build(["we", "collect", "email", "address", "cookies"]);
        EEPDModel::new(tiny_config(), vocab, 7)
    }

    #[test]
    fn default_config_mirrors_training_table() {
        let c = EEPDModelConfig::default();
        assert_eq!(c.encoder.max_len, 512);
        assert_eq!(c.encoder.dropout, 0.2);
        assert_eq!(c.max_span_len, 10);
        assert_eq!(c.span_width_emb_dim, 300);
        assert_eq!(c.span_rep_dim(), 2 * c.encoder.d_model + 300);
    }

    #[test]
    fn score_spans_rows_sum_to_one() {
        let m = model();
        let text = tokenize("We collect email address. Cookies track usage.");
        let scored = m.score_spans(&text);
        assert!(!scored.is_empty());
        for s in &scored {
            let sum: f64 = s.probs.iter().sum();
            assert!((sum - 1.0).abs() < 1e-6, "b={} e={} sum={sum}", s.b, s.e);
            assert_eq!(s.probs.len(), NUM_CLASSES);
            assert!(s.e - s.b + 1 <= m.config.max_span_len);
        }
    }

    #[test]
    fn empty_document_scores_nothing() {
        let m = model();
        let text = tokenize("");
        assert!(m.score_spans(&text).is_empty());
    }

    #[test]
    fn scoring_is_deterministic() {
        let m = model();
        let text = tokenize("We collect email address and cookies.");
        let a = m.score_spans(&text);
        let b = m.score_spans(&text);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.probs, y.probs);
        }
    }

    #[test]
    fn contrastive_uniform_when_rows_identical() {
        let s = array![[1.0, 2.0, 3.0]];
        let table = Array2::from_shape_fn((10, 3), |(_, c)| [0.5, -0.25, 1.5][c]);
        let p = EEPDModel::contrastive_probability(&s, &table).unwrap();
        for x in &p {
            assert!((x - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn contrastive_hand_value() {
        // s orthogonal to all rows except row 3 where s·y3 = ln 9
        let s = array![[9.0f64.ln(), 0.0]];
        let mut table = Array2::zeros((10, 2));
        table[(3, 0)] = 1.0;
        let p = EEPDModel::contrastive_probability(&s, &table).unwrap();
        assert!((p[3] - 0.5).abs() < 1e-12);
        for (k, x) in p.iter().enumerate() {
            if k != 3 {
                assert!((x - 1.0 / 18.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contrastive_argmax_invariant_under_positive_scaling() {
        let s = array![[0.4, -1.2, 0.7]];
        let table = gaussian(&mut ChaCha8Rng::seed_from_u64(3), 10, 3, 1.0);
        let p1 = EEPDModel::contrastive_probability(&s, &table).unwrap();
        let s2 = &s * 3.7;
        let p2 = EEPDModel::contrastive_probability(&s2, &table).unwrap();
        let argmax = |v: &[f64]| {
            v.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0
        };
        assert_eq!(argmax(&p1), argmax(&p2));
    }

    #[test]
    fn contrastive_dimension_mismatch_is_error() {
        let s = array![[1.0, 2.0]];
        let table = Array2::zeros((10, 3));
        assert!(EEPDModel::contrastive_probability(&s, &table).is_err());
    }

    #[test]
    fn windows_pack_sentences_up_to_max_len() {
        let sentences = vec![(0, 10), (10, 18), (18, 30), (30, 31)];
        let windows = pack_windows(&sentences, 20);
        // 10+8 fits, 12 starts new window, 1 joins it
        assert_eq!(windows.len(), 2);
        assert_eq!(windows[0].start, 0);
        assert_eq!(windows[0].end, 18);
        assert_eq!(windows[0].sentences, vec![(0, 10), (10, 18)]);
        assert_eq!(windows[1].start, 18);
        assert_eq!(windows[1].end, 31);
    }

    #[test]
    fn oversized_sentence_is_chunked() {
        let sentences = vec![(0, 5), (5, 50)];
        let windows = pack_windows(&sentences, 16);
        assert_eq!(windows[0].end, 5);
        // 45-token sentence chunked into 16/16/13
        assert_eq!(windows[1], Window { start: 5, end: 21, sentences: vec![(5, 21)] });
        assert_eq!(windows[2].end, 37);
        assert_eq!(windows[3].end, 50);
        // no window exceeds the cap and coverage is total
        for w in &windows {
            assert!(w.end - w.start <= 16);
        }
        assert_eq!(windows.last().unwrap().end, 50);
    }

    #[test]
    fn encoder_config_validation() {
        let mut c = EncoderConfig::default();
        assert!(c.validate().is_ok());
        c.dropout = 1.0;
        assert!(c.validate().is_err());
        c.dropout = 0.2;
        c.max_len = 0;
        assert!(c.validate().is_err());
    }
}
