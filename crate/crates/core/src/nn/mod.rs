//! Minimal reverse-mode autodiff over f64 matrices, with the layers,
//! parameter store, optimizer, and serialization the model modules build on.

pub mod graph;
pub mod layers;
pub mod params;
pub mod serialize;
pub mod vocab;

pub use graph::{Graph, Var};
pub use layers::{
    attention, causal_mask, dropout_mask, embed, ffn, init_attention, init_embedding, init_ffn,
    init_linear, linear,
};
pub use params::{bind, gaussian, warmup_lr, xavier, AdamConfig, ParamStore};
pub use serialize::{load_params, save_params, sha256_file, sha256_params};
pub use vocab::{Vocab, BOS, EOS, PAD, UNK};
