use serde::{Deserialize, Serialize};

use super::normalize::normalize_surface;
use super::rouge::rouge_l;

/// How the length reward treats the typeset formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum R2Mode {
    /// 1 − |len_G − len_R| / max(len_G, len_R), bounded to [0, 1].
    #[default]
    Normalized,
    /// (1 − |len_G − len_R|) / max(len_G, len_R), exactly as written.
    Literal,
}

/// Weights and conventions for the composite reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    /// Penalty factor for incorrect entities in the entity reward.
    pub beta: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub r2_mode: R2Mode,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            beta: 0.3,
            w1: 1.0,
            w2: 1.0,
            w3: 1.0,
            r2_mode: R2Mode::Normalized,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.beta < 0.0 {
            return Err(crate::Error::Config(format!("beta must be >= 0, got {}", self.beta)));
        }
        for (name, w) in [("w1", self.w1), ("w2", self.w2), ("w3", self.w3)] {
            if w < 0.0 {
                return Err(crate::Error::Config(format!("{name} must be >= 0, got {w}")));
            }
        }
        Ok(())
    }
}

/// Outcome of comparing extracted entities against the reference set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMatchResult {
    pub total: usize,
    pub correct: usize,
    pub incorrect: usize,
}

/// The three reward components and their weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub composite: f64,
}

/// Length-agreement reward between generated and reference token counts.
/// Both lengths zero counts as perfect agreement.
pub fn reward_r2(len_g: usize, len_r: usize, mode: R2Mode) -> f64 {
    let max = len_g.max(len_r) as f64;
    if max == 0.0 {
        return 1.0;
    }
    let dev = (len_g as f64 - len_r as f64).abs();
    match mode {
        R2Mode::Normalized => 1.0 - dev / max,
        R2Mode::Literal => (1.0 - dev) / max,
    }
}

/// Entity reward (correct − β·incorrect) / total; zero when nothing was
/// extracted.
pub fn reward_r3(m: &EntityMatchResult, beta: f64) -> f64 {
    if m.total == 0 {
        return 0.0;
    }
    (m.correct as f64 - beta * m.incorrect as f64) / m.total as f64
}

/// Extracts entity surface strings from a generated summary's tokens.
/// Implemented by the span-detection model; the stubs below serve scoring
/// pipelines that run without a trained model.
pub trait EntityExtractor: Sync {
    fn extract(&self, tokens: &[String]) -> Vec<String>;
}

/// Returns a fixed set of surfaces regardless of input. Used to model a
/// perfect extractor in tests and identities.
pub struct FixedExtractor(pub Vec<String>);

impl EntityExtractor for FixedExtractor {
    fn extract(&self, _tokens: &[String]) -> Vec<String> {
        self.0.clone()
    }
}

/// Model-free fallback: reports each gold surface whose normalized token
/// sequence occurs contiguously in the generated tokens.
pub struct SurfaceMatchExtractor {
    pub gold: Vec<String>,
}

impl EntityExtractor for SurfaceMatchExtractor {
    fn extract(&self, tokens: &[String]) -> Vec<String> {
        let haystack = super::normalize::normalize_tokens(tokens);
        self.gold
            .iter()
            .filter(|g| {
                let needle: Vec<String> = normalize_surface(g)
                    .split_whitespace()
                    .map(|s| s.to_string())
                    .collect();
                !needle.is_empty() && contains_subslice(&haystack, &needle)
            })
            .cloned()
            .collect()
    }
}

pub(crate) fn contains_subslice(haystack: &[String], needle: &[String]) -> bool {
    haystack.len() >= needle.len()
        && (0..=haystack.len() - needle.len()).any(|i| &haystack[i..i + needle.len()] == needle)
}

/// Compares extracted surfaces to gold surfaces after normalization,
/// label-agnostic. Duplicate extractions each count once.
pub fn match_entities(predicted: &[String], gold: &[String]) -> EntityMatchResult {
    let gold_norm: Vec<String> = gold.iter().map(|g| normalize_surface(g)).collect();
    let total = predicted.len();
    let correct = predicted
        .iter()
        .filter(|p| gold_norm.contains(&normalize_surface(p)))
        .count();
    EntityMatchResult {
        total,
        correct,
        incorrect: total - correct,
    }
}

/// Full reward for one generated/reference pair: ROUGE-L F, length
/// agreement, and the entity reward over extractor output.
pub fn composite_reward(
    generated: &[String],
    reference: &[String],
    gold_entities: &[String],
    extractor: &dyn EntityExtractor,
    config: &RewardConfig,
) -> RewardBreakdown {
    let r1 = rouge_l(generated, reference).f;
    let r2 = reward_r2(generated.len(), reference.len(), config.r2_mode);
    let predicted = extractor.extract(generated);
    let matched = match_entities(&predicted, gold_entities);
    let r3 = reward_r3(&matched, config.beta);
    RewardBreakdown {
        r1,
        r2,
        r3,
        composite: config.w1 * r1 + config.w2 * r2 + config.w3 * r3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn surfaces(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn r2_normalized_examples() {
        assert_eq!(reward_r2(100, 100, R2Mode::Normalized), 1.0);
        assert!((reward_r2(50, 100, R2Mode::Normalized) - 0.5).abs() < 1e-12);
        assert_eq!(reward_r2(0, 0, R2Mode::Normalized), 1.0);
    }

    #[test]
    fn r2_literal_matches_typeset_formula() {
        let v = reward_r2(50, 100, R2Mode::Literal);
        assert!((v - (-0.49)).abs() < 1e-12);
        assert!((reward_r2(100, 100, R2Mode::Literal) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn r2_normalized_is_symmetric_and_tops_at_equal_lengths() {
        for (a, b) in [(3usize, 9usize), (120, 80), (1, 1)] {
            let ab = reward_r2(a, b, R2Mode::Normalized);
            let ba = reward_r2(b, a, R2Mode::Normalized);
            assert_eq!(ab, ba);
            assert!((0.0..=1.0).contains(&ab));
            if a == b {
                assert_eq!(ab, 1.0);
            } else {
                assert!(ab < 1.0);
            }
        }
    }

    #[test]
    fn r3_examples() {
        let all = EntityMatchResult { total: 4, correct: 4, incorrect: 0 };
        assert_eq!(reward_r3(&all, 0.3), 1.0);
        let three = EntityMatchResult { total: 4, correct: 3, incorrect: 1 };
        assert!((reward_r3(&three, 0.3) - 0.675).abs() < 1e-12);
        let none = EntityMatchResult { total: 0, correct: 0, incorrect: 0 };
        assert_eq!(reward_r3(&none, 0.3), 0.0);
    }

    #[test]
    fn r3_monotonicity() {
        let beta = 0.3;
        for correct in 0..=6usize {
            let total = 6usize;
            let a = EntityMatchResult { total, correct, incorrect: total - correct };
            if correct < total {
                let b = EntityMatchResult { total, correct: correct + 1, incorrect: total - correct - 1 };
                assert!(reward_r3(&b, beta) >= reward_r3(&a, beta));
            }
        }
    }

    #[test]
    fn entity_matching_examples() {
        let gold = surfaces(&["cookies"]);
        let pred = surfaces(&["cookies", "ads"]);
        let m = match_entities(&pred, &gold);
        assert_eq!(m, EntityMatchResult { total: 2, correct: 1, incorrect: 1 });

        let m = match_entities(&gold, &gold);
        assert_eq!(m.incorrect, 0);

        let m = match_entities(&[], &gold);
        assert_eq!(m, EntityMatchResult { total: 0, correct: 0, incorrect: 0 });
    }

    #[test]
    fn entity_matching_normalizes_surfaces() {
        let gold = surfaces(&["Email Address."]);
        let pred = surfaces(&["email  address"]);
        let m = match_entities(&pred, &gold);
        assert_eq!(m.correct, 1);
    }

    #[test]
    fn surface_match_extractor_finds_contiguous_gold() {
        let ex = SurfaceMatchExtractor { gold: surfaces(&["email address", "cookies"]) };
        let found = ex.extract(&toks(&["Collects", "email", "address", "."]));
        assert_eq!(found, surfaces(&["email address"]));
        let none = ex.extract(&toks(&["nothing", "here"]));
        assert!(none.is_empty());
    }

    #[test]
    fn perfect_pair_composite_is_weight_sum() {
        let s = toks(&["collects", "email", "address"]);
        let gold = surfaces(&["email address"]);
        let ex = FixedExtractor(gold.clone());
        let cfg = RewardConfig::default();
        let b = composite_reward(&s, &s, &gold, &ex, &cfg);
        assert_eq!(b.r1, 1.0);
        assert_eq!(b.r2, 1.0);
        assert_eq!(b.r3, 1.0);
        assert!((b.composite - (cfg.w1 + cfg.w2 + cfg.w3)).abs() < 1e-12);
    }

    #[test]
    fn weights_select_components() {
        let g = toks(&["a", "b"]);
        let r = toks(&["a", "b", "c", "d"]);
        let ex = FixedExtractor(vec![]);
        let cfg = RewardConfig { w1: 1.0, w2: 0.0, w3: 0.0, ..RewardConfig::default() };
        let b = composite_reward(&g, &r, &[], &ex, &cfg);
        assert!((b.composite - b.r1).abs() < 1e-12);
    }

    #[test]
    fn composite_is_linear_in_weights() {
        let g = toks(&["x", "y", "z"]);
        let r = toks(&["x", "q"]);
        let gold = surfaces(&["x"]);
        let ex = SurfaceMatchExtractor { gold: gold.clone() };
        let base = RewardConfig::default();
        let b1 = composite_reward(&g, &r, &gold, &ex, &base);
        let doubled = RewardConfig { w1: 2.0, w2: 2.0, w3: 2.0, ..base.clone() };
        let b2 = composite_reward(&g, &r, &gold, &ex, &doubled);
        assert!((b2.composite - 2.0 * b1.composite).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        assert!(RewardConfig::default().validate().is_ok());
        let bad = RewardConfig { beta: -0.1, ..RewardConfig::default() };
        assert!(bad.validate().is_err());
        let bad = RewardConfig { w2: -1.0, ..RewardConfig::default() };
        assert!(bad.validate().is_err());
    }
}
