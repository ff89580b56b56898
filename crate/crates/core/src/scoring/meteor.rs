use rust_stemmers::{Algorithm, Stemmer};

/// METEOR for a single pair, original exact + stem matching without
/// paraphrase tables. Unigram precision and recall are combined by the
/// recall-weighted harmonic mean Fmean = 10PR/(R + 9P), then scaled by the
/// fragmentation penalty 0.5·(chunks/matches)³.
///
/// A candidate identical to the reference scores exactly 1; otherwise the
/// formula above applies unchanged.
pub fn meteor(candidate: &[String], reference: &[String]) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    if candidate == reference {
        return 1.0;
    }
    let alignment = align(candidate, reference);
    let m = alignment.len() as f64;
    if alignment.is_empty() {
        return 0.0;
    }
    let precision = m / candidate.len() as f64;
    let recall = m / reference.len() as f64;
    let fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let chunks = count_chunks(&alignment) as f64;
    let penalty = 0.5 * (chunks / m).powi(3);
    fmean * (1.0 - penalty)
}

/// Greedy two-stage unigram alignment: exact matches first, then stem
/// matches over what remains. Returns (candidate index, reference index)
/// pairs sorted by candidate index.
fn align(candidate: &[String], reference: &[String]) -> Vec<(usize, usize)> {
    let mut cand_used = vec![false; candidate.len()];
    let mut ref_used = vec![false; reference.len()];
    let mut pairs = Vec::new();

    let lower = |s: &String| s.to_lowercase();
    let cand_exact: Vec<String> = candidate.iter().map(lower).collect();
    let ref_exact: Vec<String> = reference.iter().map(lower).collect();
    greedy_stage(&cand_exact, &ref_exact, &mut cand_used, &mut ref_used, &mut pairs);

    let stemmer = Stemmer::create(Algorithm::English);
    let cand_stem: Vec<String> = cand_exact.iter().map(|t| stemmer.stem(t).into_owned()).collect();
    let ref_stem: Vec<String> = ref_exact.iter().map(|t| stemmer.stem(t).into_owned()).collect();
    greedy_stage(&cand_stem, &ref_stem, &mut cand_used, &mut ref_used, &mut pairs);

    pairs.sort_unstable();
    pairs
}

fn greedy_stage(
    cand_keys: &[String],
    ref_keys: &[String],
    cand_used: &mut [bool],
    ref_used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
) {
    for (i, key) in cand_keys.iter().enumerate() {
        if cand_used[i] {
            continue;
        }
        for (j, rkey) in ref_keys.iter().enumerate() {
            if !ref_used[j] && key == rkey {
                cand_used[i] = true;
                ref_used[j] = true;
                pairs.push((i, j));
                break;
            }
        }
    }
}

/// Number of maximal runs of matches that are contiguous and in order on
/// both sides.
fn count_chunks(pairs: &[(usize, usize)]) -> usize {
    let mut chunks = 0usize;
    let mut prev: Option<(usize, usize)> = None;
    for &(c, r) in pairs {
        match prev {
            Some((pc, pr)) if c == pc + 1 && r == pr + 1 => {}
            _ => chunks += 1,
        }
        prev = Some((c, r));
    }
    chunks
}
