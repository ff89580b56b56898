use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::lcs::lcs_length;

/// Precision / recall / F-measure triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

impl PrfScore {
    pub fn zero() -> Self {
        Self {
            precision: 0.0,
            recall: 0.0,
            f: 0.0,
        }
    }

    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f,
        }
    }
}

/// ROUGE-L: P = LCS/|candidate|, R = LCS/|reference|, F harmonic.
/// Either side empty yields all zeros.
pub fn rouge_l<T: PartialEq>(candidate: &[T], reference: &[T]) -> PrfScore {
    if candidate.is_empty() || reference.is_empty() {
        return PrfScore::zero();
    }
    let lcs = lcs_length(candidate, reference) as f64;
    PrfScore::from_pr(lcs / candidate.len() as f64, lcs / reference.len() as f64)
}

/// Multiset of n-grams of order `n`.
pub fn ngram_counts<T: Eq + Hash + Clone>(tokens: &[T], n: usize) -> HashMap<Vec<T>, usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for window in tokens.windows(n) {
        *counts.entry(window.to_vec()).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram overlap: sum over n-grams of min(candidate count,
/// reference count).
pub fn ngram_overlap<T: Eq + Hash + Clone>(candidate: &[T], reference: &[T], n: usize) -> usize {
    let cand = ngram_counts(candidate, n);
    let refc = ngram_counts(reference, n);
    cand.iter()
        .map(|(gram, &c)| c.min(refc.get(gram).copied().unwrap_or(0)))
        .sum()
}

/// ROUGE-N: n-gram overlap precision/recall/F. Degenerate inputs (too short
/// for the order) yield zeros.
pub fn rouge_n<T: Eq + Hash + Clone>(candidate: &[T], reference: &[T], n: usize) -> PrfScore {
    let cand_total = candidate.len().saturating_sub(n.saturating_sub(1));
    let ref_total = reference.len().saturating_sub(n.saturating_sub(1));
    if n == 0 || cand_total == 0 || ref_total == 0 {
        return PrfScore::zero();
    }
    let overlap = ngram_overlap(candidate, reference, n) as f64;
    PrfScore::from_pr(overlap / cand_total as f64, overlap / ref_total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Quadratic oracle: count each candidate n-gram's clipped matches by
    /// rescanning the reference.
    fn overlap_brute(candidate: &[u8], reference: &[u8], n: usize) -> usize {
        if n == 0 || candidate.len() < n || reference.len() < n {
            return 0;
        }
        let cand_grams: Vec<&[u8]> = candidate.windows(n).collect();
        let ref_grams: Vec<&[u8]> = reference.windows(n).collect();
        let mut seen: Vec<&[u8]> = Vec::new();
        let mut total = 0usize;
        for gram in &cand_grams {
            if seen.contains(gram) {
                continue;
            }
            seen.push(gram);
            let in_cand = cand_grams.iter().filter(|g| *g == gram).count();
            let in_ref = ref_grams.iter().filter(|g| *g == gram).count();
            total += in_cand.min(in_ref);
        }
        total
    }

    #[test]
    fn identical_gives_f_one() {
        let s = vec!["we", "use", "cookies"];
        let r = rouge_l(&s, &s);
        assert_eq!(r.f, 1.0);
        let r = rouge_n(&s, &s, 2);
        assert_eq!(r.f, 1.0);
    }

    #[test]
    fn hand_arithmetic_example() {
        let c = ["a", "b", "c", "d"];
        let r = ["a", "c", "d"];
        let score = rouge_l(&c, &r);
        assert!((score.precision - 0.75).abs() < 1e-12);
        assert!((score.recall - 1.0).abs() < 1e-12);
        assert!((score.f - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn empty_candidate_gives_zero() {
        let r = ["a", "b"];
        assert_eq!(rouge_l::<&str>(&[], &r).f, 0.0);
        assert_eq!(rouge_l::<&str>(&[], &[]).f, 0.0);
        assert_eq!(rouge_n::<&str>(&[], &r, 1).f, 0.0);
    }

    #[test]
    fn f_is_one_only_for_equal_sequences() {
        let c = ["a", "b", "c"];
        let r = ["a", "c", "b"];
        let score = rouge_l(&c, &r);
        assert!(score.f < 1.0);
    }

    #[test]
    fn overlap_matches_brute_force_on_200_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let la = rng.gen_range(0..=12);
            let lb = rng.gen_range(0..=12);
            let n = rng.gen_range(1..=4);
            let a: Vec<u8> = (0..la).map(|_| rng.gen_range(0..4)).collect();
            let b: Vec<u8> = (0..lb).map(|_| rng.gen_range(0..4)).collect();
            assert_eq!(
                ngram_overlap(&a, &b, n),
                overlap_brute(&a, &b, n),
                "a={a:?} b={b:?} n={n}"
            );
        }
    }

    #[test]
    fn rouge_values_stay_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let la = rng.gen_range(0..=10);
            let lb = rng.gen_range(0..=10);
            let a: Vec<u8> = (0..la).map(|_| rng.gen_range(0..3)).collect();
            let b: Vec<u8> = (0..lb).map(|_| rng.gen_range(0..3)).collect();
            for score in [rouge_l(&a, &b), rouge_n(&a, &b, 1), rouge_n(&a, &b, 2)] {
                assert!((0.0..=1.0).contains(&score.f));
                assert!((0.0..=1.0).contains(&score.precision));
                assert!((0.0..=1.0).contains(&score.recall));
            }
        }
    }
}
