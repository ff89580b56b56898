use super::rouge::ngram_overlap;

/// BLEU-n for a single candidate/reference pair: geometric mean of modified
/// k-gram precisions for k = 1..=n with uniform weights, times the standard
/// brevity penalty. No smoothing; any zero precision yields 0.
pub fn bleu_n(candidate: &[String], reference: &[String], n: usize) -> f64 {
    assert!(n >= 1, "bleu order must be at least 1");
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0f64;
    for k in 1..=n {
        let total = candidate.len().saturating_sub(k - 1);
        if total == 0 {
            return 0.0;
        }
        let clipped = ngram_overlap(candidate, reference, k);
        if clipped == 0 {
            return 0.0;
        }
        log_sum += (clipped as f64 / total as f64).ln();
    }
    let precision_part = (log_sum / n as f64).exp();
    brevity_penalty(candidate.len(), reference.len()) * precision_part
}

/// Standard brevity penalty: 1 when the candidate is at least as long as the
/// reference, exp(1 − r/c) otherwise.
pub fn brevity_penalty(candidate_len: usize, reference_len: usize) -> f64 {
    if candidate_len == 0 {
        return 0.0;
    }
    if candidate_len >= reference_len {
        1.0
    } else {
        (1.0 - reference_len as f64 / candidate_len as f64).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    /// Direct-from-definition oracle computed without the shared n-gram
    /// helpers: counts matches by scanning, then applies BP and the
    /// geometric mean by explicit multiplication.
    fn bleu_brute(candidate: &[String], reference: &[String], n: usize) -> f64 {
        if candidate.is_empty() || reference.is_empty() {
            return 0.0;
        }
        let mut product = 1.0f64;
        for k in 1..=n {
            if candidate.len() < k {
                return 0.0;
            }
            let cand: Vec<&[String]> = candidate.windows(k).collect();
            let refs: Vec<&[String]> = reference.windows(k).collect();
            let mut matched = 0usize;
            let mut used = vec![false; refs.len()];
            for gram in &cand {
                if let Some(pos) = refs
                    .iter()
                    .enumerate()
                    .position(|(i, g)| !used[i] && g == gram)
                {
                    used[pos] = true;
                    matched += 1;
                }
            }
            if matched == 0 {
                return 0.0;
            }
            product *= matched as f64 / cand.len() as f64;
        }
        let bp = if candidate.len() >= reference.len() {
            1.0
        } else {
            (1.0 - reference.len() as f64 / candidate.len() as f64).exp()
        };
        bp * product.powf(1.0 / n as f64)
    }

    #[test]
    fn identical_gives_one_for_all_orders() {
        let s = toks(&["we", "collect", "usage", "data", "daily"]);
        for n in 1..=4 {
            assert!((bleu_n(&s, &s, n) - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn longer_candidate_has_no_brevity_penalty() {
        let c = toks(&["the", "cat", "sat"]);
        let r = toks(&["the", "cat"]);
        let b1 = bleu_n(&c, &r, 1);
        assert!((b1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn shorter_candidate_is_penalized() {
        let c = toks(&["the", "cat"]);
        let r = toks(&["the", "cat", "sat"]);
        let b1 = bleu_n(&c, &r, 1);
        let expected = (1.0f64 - 3.0 / 2.0).exp() * 1.0;
        assert!((b1 - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_ngram_match_yields_zero() {
        let c = toks(&["alpha", "beta"]);
        let r = toks(&["gamma", "delta"]);
        for n in 1..=4 {
            assert_eq!(bleu_n(&c, &r, n), 0.0);
        }
        // unigrams match but no shared bigram
        let c = toks(&["a", "x", "b"]);
        let r = toks(&["a", "y", "b"]);
        assert!(bleu_n(&c, &r, 1) > 0.0);
        assert_eq!(bleu_n(&c, &r, 2), 0.0);
    }

    #[test]
    fn clipping_limits_repeated_tokens() {
        let c = toks(&["the", "the", "the", "the"]);
        let r = toks(&["the", "cat"]);
        // only one "the" in the reference; clipped precision 1/4
        assert!((bleu_n(&c, &r, 1) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn matches_definition_oracle_on_200_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let vocab = ["a", "b", "c", "d"];
        for _ in 0..200 {
            let lc = rng.gen_range(0..=12);
            let lr = rng.gen_range(0..=12);
            let n = rng.gen_range(1..=4);
            let c: Vec<String> = (0..lc)
                .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
                .collect();
            let r: Vec<String> = (0..lr)
                .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
                .collect();
            let got = bleu_n(&c, &r, n);
            let want = bleu_brute(&c, &r, n);
            assert!((got - want).abs() < 1e-9, "c={c:?} r={r:?} n={n}");
            assert!((0.0..=1.0 + 1e-12).contains(&got));
        }
    }
}
