use ndarray::Array2;

use super::graph::{Graph, Var};
use super::params::{bind, gaussian, xavier, ParamStore};

/// Names and creates the parameters of a linear layer `{prefix}.w`,
/// `{prefix}.b`.
pub fn init_linear<R: rand::Rng>(
    store: &mut ParamStore,
    rng: &mut R,
    prefix: &str,
    d_in: usize,
    d_out: usize,
) {
    store.insert(&format!("{prefix}.w"), xavier(rng, d_in, d_out));
    store.insert(&format!("{prefix}.b"), Array2::zeros((1, d_out)));
}

pub fn linear(g: &mut Graph, store: &ParamStore, prefix: &str, x: Var) -> Var {
    let w = bind(g, store, &format!("{prefix}.w"));
    let b = bind(g, store, &format!("{prefix}.b"));
    let xw = g.matmul(x, w);
    g.add_broadcast_row(xw, b)
}

/// Single-head scaled dot-product attention parameters:
/// `{prefix}.wq/.wk/.wv/.wo`, each `d_model` square.
pub fn init_attention<R: rand::Rng>(
    store: &mut ParamStore,
    rng: &mut R,
    prefix: &str,
    d_model: usize,
) {
    for name in ["wq", "wk", "wv", "wo"] {
        store.insert(&format!("{prefix}.{name}"), xavier(rng, d_model, d_model));
    }
}

/// Attention of `x_q` over `x_kv`. `mask` is an additive score matrix
/// (0 to pass, large negative to block) of shape (n_q, n_kv).
pub fn attention(
    g: &mut Graph,
    store: &ParamStore,
    prefix: &str,
    x_q: Var,
    x_kv: Var,
    mask: Option<&Array2<f64>>,
) -> Var {
    let d_model = g.value(x_q).ncols();
    let wq = bind(g, store, &format!("{prefix}.wq"));
    let wk = bind(g, store, &format!("{prefix}.wk"));
    let wv = bind(g, store, &format!("{prefix}.wv"));
    let wo = bind(g, store, &format!("{prefix}.wo"));
    let q = g.matmul(x_q, wq);
    let k = g.matmul(x_kv, wk);
    let v = g.matmul(x_kv, wv);
    let kt = g.transpose(k);
    let scores = g.matmul(q, kt);
    let mut scores = g.scale(scores, 1.0 / (d_model as f64).sqrt());
    if let Some(m) = mask {
        let mc = g.constant(m.clone());
        scores = g.add(scores, mc);
    }
    let attn = g.softmax_rows(scores);
    let mixed = g.matmul(attn, v);
    g.matmul(mixed, wo)
}

/// Two-layer feed-forward parameters `{prefix}.w1/.b1/.w2/.b2`.
pub fn init_ffn<R: rand::Rng>(
    store: &mut ParamStore,
    rng: &mut R,
    prefix: &str,
    d_model: usize,
    d_ff: usize,
) {
    store.insert(&format!("{prefix}.w1"), xavier(rng, d_model, d_ff));
    store.insert(&format!("{prefix}.b1"), Array2::zeros((1, d_ff)));
    store.insert(&format!("{prefix}.w2"), xavier(rng, d_ff, d_model));
    store.insert(&format!("{prefix}.b2"), Array2::zeros((1, d_model)));
}

pub fn ffn(g: &mut Graph, store: &ParamStore, prefix: &str, x: Var) -> Var {
    let w1 = bind(g, store, &format!("{prefix}.w1"));
    let b1 = bind(g, store, &format!("{prefix}.b1"));
    let w2 = bind(g, store, &format!("{prefix}.w2"));
    let b2 = bind(g, store, &format!("{prefix}.b2"));
    let h = g.matmul(x, w1);
    let h = g.add_broadcast_row(h, b1);
    let h = g.relu(h);
    let h = g.matmul(h, w2);
    g.add_broadcast_row(h, b2)
}

/// Token + learned positional embedding tables `{prefix}.emb` (vocab × d)
/// and `{prefix}.pos` (max_len × d).
pub fn init_embedding<R: rand::Rng>(
    store: &mut ParamStore,
    rng: &mut R,
    prefix: &str,
    vocab_size: usize,
    max_len: usize,
    d_model: usize,
) {
    store.insert(&format!("{prefix}.emb"), gaussian(rng, vocab_size, d_model, 0.02));
    store.insert(&format!("{prefix}.pos"), gaussian(rng, max_len, d_model, 0.02));
}

/// Embeds a token-id sequence: emb[ids] + pos[0..n]. Panics if the sequence
/// exceeds the positional table.
pub fn embed(g: &mut Graph, store: &ParamStore, prefix: &str, ids: &[usize]) -> Var {
    let emb = bind(g, store, &format!("{prefix}.emb"));
    let pos = bind(g, store, &format!("{prefix}.pos"));
    assert!(
        ids.len() <= g.value(pos).nrows(),
        "sequence length {} exceeds positional table {}",
        ids.len(),
        g.value(pos).nrows()
    );
    let tok = g.rows(emb, ids.to_vec());
    let pos_rows = g.rows(pos, (0..ids.len()).collect());
    g.add(tok, pos_rows)
}

/// Additive causal mask: entry (i, j) is 0 for j ≤ i, −1e9 otherwise.
pub fn causal_mask(n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| if j <= i { 0.0 } else { -1e9 })
}

/// Inverted-dropout mask as a constant graph leaf: entries are either 0 or
/// 1/(1−p). Identity when p = 0.
pub fn dropout_mask<R: rand::Rng>(rng: &mut R, rows: usize, cols: usize, p: f64) -> Array2<f64> {
    assert!((0.0..1.0).contains(&p), "dropout p must be in [0, 1)");
    if p == 0.0 {
        return Array2::ones((rows, cols));
    }
    let keep = 1.0 - p;
    Array2::from_shape_fn((rows, cols), |_| {
        if rng.gen_range(0.0..1.0) < keep {
            1.0 / keep
        } else {
            0.0
        }
    })
}
