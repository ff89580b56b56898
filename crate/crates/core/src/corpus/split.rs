use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::doc::AnnotatedDocument;

/// Splits a corpus into train/test partitions by shuffling with a seeded
/// generator and cutting at `floor(n * ratio)`.
pub fn split_corpus(
    docs: Vec<AnnotatedDocument>,
    ratio: f64,
    seed: u64,
) -> Result<(Vec<AnnotatedDocument>, Vec<AnnotatedDocument>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!(
            "split ratio must be in (0, 1), got {ratio}"
        )));
    }
    let mut indices: Vec<usize> = (0..docs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let cut = (docs.len() as f64 * ratio).floor() as usize;
    let train_idx = &indices[..cut];
    let test_idx = &indices[cut..];

    let mut slots: Vec<Option<AnnotatedDocument>> = docs.into_iter().map(Some).collect();
    let take = |idx: &[usize], slots: &mut Vec<Option<AnnotatedDocument>>| {
        idx.iter().map(|&i| slots[i].take().unwrap()).collect()
    };
    let train: Vec<AnnotatedDocument> = take(train_idx, &mut slots);
    let test: Vec<AnnotatedDocument> = take(test_idx, &mut slots);
    Ok((train, test))
}
