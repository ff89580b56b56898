//! Entity-driven controlled summarization of privacy-policy documents.
//!
//! The crate is organized around a small pipeline: a span-based entity
//! detector, an encoder-decoder summarizer trained with an entity-coverage
//! penalty, reward functions and evaluation metrics for generated summaries,
//! and a PPO fine-tuning loop that optimizes the summarizer against the
//! composite reward.

pub mod corpus;
pub mod eepd;
pub mod error;
pub mod nn;
pub mod ppo;
pub mod scoring;
pub mod summarizer;

pub use error::{Error, Result};
