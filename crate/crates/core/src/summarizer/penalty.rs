use crate::scoring::normalize::normalize_surface;
use crate::scoring::normalize_tokens;
use crate::scoring::rewards::contains_subslice;

/// Number of gold entities whose normalized token sequence does not occur
/// contiguously in the normalized generated tokens.
pub fn token_penalty(entities: &[String], generated: &[String]) -> usize {
    let haystack = normalize_tokens(generated);
    entities
        .iter()
        .filter(|e| {
            let needle: Vec<String> = normalize_surface(e)
                .split_whitespace()
                .map(str::to_string)
                .collect();
            needle.is_empty() || !contains_subslice(&haystack, &needle)
        })
        .count()
}

/// First position of the entity's normalized token sequence inside the
/// reference tokens, as a half-open range of original token indices. The
/// haystack is only lowercased (not edge-stripped) so that indices stay
/// aligned with the input; the needle's ends are non-punctuation after
/// normalization, so stripping would not change what matches.
pub fn locate_entity(entity: &str, reference: &[String]) -> Option<std::ops::Range<usize>> {
    let haystack: Vec<String> = reference.iter().map(|t| t.to_lowercase()).collect();
    let needle: Vec<String> = normalize_surface(entity)
        .split_whitespace()
        .map(str::to_string)
        .collect();
    if needle.is_empty() || haystack.len() < needle.len() {
        return None;
    }
    (0..=haystack.len() - needle.len())
        .find(|&i| haystack[i..i + needle.len()] == needle[..])
        .map(|i| i..i + needle.len())
}
