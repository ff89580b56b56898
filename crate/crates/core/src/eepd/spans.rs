/// All candidate spans (b, e) over `n` tokens with width at most `l`,
/// ordered by start then end. Both bounds are inclusive token indices.
pub fn enumerate_spans(n: usize, l: usize) -> Vec<(usize, usize)> {
    assert!(l >= 1, "max span length must be at least 1");
    let mut spans = Vec::with_capacity(span_count(n, l));
    for b in 0..n {
        let last = (b + l - 1).min(n - 1);
        for e in b..=last {
            spans.push((b, e));
        }
    }
    spans
}

/// Closed form for the number of spans: Σ_{k=1..l} max(0, n − k + 1).
pub fn span_count(n: usize, l: usize) -> usize {
    (1..=l).map(|k| n.saturating_sub(k - 1)).sum()
}
