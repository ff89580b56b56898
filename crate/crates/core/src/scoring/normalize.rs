use crate::corpus::tokenize;

/// True when every character of the token is non-alphanumeric.
pub fn is_punctuation_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| !c.is_alphanumeric())
}

/// Normalizes a token sequence for surface comparison: lowercase every
/// token and strip punctuation-only tokens from both ends.
pub fn normalize_tokens(tokens: &[String]) -> Vec<String> {
    let start = tokens
        .iter()
        .position(|t| !is_punctuation_token(t))
        .unwrap_or(tokens.len());
    let end = tokens
        .iter()
        .rposition(|t| !is_punctuation_token(t))
        .map_or(start, |i| i + 1);
    tokens[start..end].iter().map(|t| t.to_lowercase()).collect()
}

/// Canonical form of an entity surface string: tokenize, normalize, join
/// with single spaces. Whitespace differences and edge punctuation vanish.
pub fn normalize_surface(surface: &str) -> String {
    normalize_tokens(&tokenize(surface).tokens).join(" ")
}
