/// Maps a token to a dense vector. Implementations must be deterministic;
/// scoring treats the encoder as a black box.
pub trait TokenEncoder: Sync {
    fn encode(&self, token: &str) -> Vec<f64>;
}

/// Hashed character n-gram count encoder. Each token is lowercased, wrapped
/// in boundary markers, and its n-grams (orders `min_n..=max_n`) are counted
/// into a fixed-width vector by FNV-1a hashing. Self-contained stand-in for
/// a learned embedding: similar surfaces land on similar vectors.
pub struct CharNgramEncoder {
    pub dim: usize,
    pub min_n: usize,
    pub max_n: usize,
}

impl Default for CharNgramEncoder {
    fn default() -> Self {
        Self {
            dim: 256,
            min_n: 1,
            max_n: 3,
        }
    }
}

impl TokenEncoder for CharNgramEncoder {
    fn encode(&self, token: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        let wrapped: Vec<char> = std::iter::once('^')
            .chain(token.to_lowercase().chars())
            .chain(std::iter::once('$'))
            .collect();
        for n in self.min_n..=self.max_n {
            if wrapped.len() < n {
                continue;
            }
            for gram in wrapped.windows(n) {
                let mut hash: u64 = 0xcbf29ce484222325;
                for c in gram {
                    for byte in (*c as u32).to_le_bytes() {
                        hash ^= u64::from(byte);
                        hash = hash.wrapping_mul(0x100000001b3);
                    }
                }
                v[(hash % self.dim as u64) as usize] += 1.0;
            }
        }
        v
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(0.0, 1.0)
    }
}

/// Greedy token-embedding similarity F-score: precision is the mean over
/// candidate tokens of the best cosine against any reference token, recall
/// the mirror image, combined harmonically. Either side empty yields 0.
pub fn embedding_similarity(
    candidate: &[String],
    reference: &[String],
    encoder: &dyn TokenEncoder,
) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let cand: Vec<Vec<f64>> = candidate.iter().map(|t| encoder.encode(t)).collect();
    let refs: Vec<Vec<f64>> = reference.iter().map(|t| encoder.encode(t)).collect();
    let best_against = |from: &[Vec<f64>], against: &[Vec<f64>]| -> f64 {
        let total: f64 = from
            .iter()
            .map(|v| {
                against
                    .iter()
                    .map(|w| cosine(v, w))
                    .fold(0.0f64, f64::max)
            })
            .sum();
        total / from.len() as f64
    };
    let precision = best_against(&cand, &refs);
    let recall = best_against(&refs, &cand);
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}
