use serde::{Deserialize, Serialize};

/// A text together with its deterministic rule-based tokenization.
///
/// Tokens are exact byte slices of `raw` (no transformation), so any token
/// span can be mapped back to the original text. Sentence boundaries are
/// half-open `[start, end)` token-index ranges that partition `0..tokens.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedText {
    pub raw: String,
    pub tokens: Vec<String>,
    /// Byte offsets `(start, end)` of each token in `raw`.
    pub offsets: Vec<(usize, usize)>,
    /// Half-open token-index intervals, one per sentence.
    pub sentences: Vec<(usize, usize)>,
}

impl TokenizedText {
    pub fn n_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Raw-text slice covering tokens `b..=e` (inclusive), with original
    /// inter-token whitespace preserved.
    pub fn surface(&self, b: usize, e: usize) -> Option<&str> {
        let (start, _) = *self.offsets.get(b)?;
        let (_, end) = *self.offsets.get(e)?;
        if b > e {
            return None;
        }
        self.raw.get(start..end)
    }

    /// Tokens of the sentence with the given index.
    pub fn sentence_tokens(&self, sentence: usize) -> Option<&[String]> {
        let (s, e) = *self.sentences.get(sentence)?;
        Some(&self.tokens[s..e])
    }

    /// Checks the structural invariants: offsets in order, tokens equal to
    /// their raw slices, sentences partitioning the token range.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut prev_end = 0usize;
        for (i, &(s, e)) in self.offsets.iter().enumerate() {
            if s < prev_end || e <= s {
                return Err(format!("token {i} offsets out of order"));
            }
            match self.raw.get(s..e) {
                Some(slice) if slice == self.tokens[i] => {}
                _ => return Err(format!("token {i} does not match raw slice")),
            }
            prev_end = e;
        }
        let mut covered = 0usize;
        for (i, &(s, e)) in self.sentences.iter().enumerate() {
            if s != covered || e <= s {
                return Err(format!("sentence {i} does not continue the partition"));
            }
            covered = e;
        }
        if covered != self.tokens.len() {
            return Err("sentences do not cover the token range".to_string());
        }
        Ok(())
    }
}

/// Deterministic word tokenizer with sentence splitting.
///
/// Sentences are split first on terminal punctuation (`.`, `!`, `?`, allowing
/// trailing quotes/brackets) followed by whitespace. Within a sentence, tokens
/// are maximal alphanumeric runs; an apostrophe or a `-`/`.`/`,` surrounded by
/// word characters stays inside the run (so `don't`, `third-party`, and `3.5`
/// hold together, with standard contraction splits applied afterwards). Every
/// other non-whitespace character becomes a single-character token.
pub fn tokenize(text: &str) -> TokenizedText {
    let mut tokens = Vec::new();
    let mut offsets = Vec::new();
    let mut sentences = Vec::new();

    for (sent_start, sent_end) in sentence_byte_ranges(text) {
        let token_start = tokens.len();
        tokenize_range(text, sent_start, sent_end, &mut tokens, &mut offsets);
        if tokens.len() > token_start {
            sentences.push((token_start, tokens.len()));
        }
    }

    TokenizedText {
        raw: text.to_string(),
        tokens,
        offsets,
        sentences,
    }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{2019}' | '\u{201d}')
}

/// Byte ranges of sentences in `text`. A sentence ends after a run of
/// terminal punctuation (plus any closing quotes/brackets) that is followed
/// by whitespace or end of text; a terminal between digits does not end a
/// sentence.
fn sentence_byte_ranges(text: &str) -> Vec<(usize, usize)> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut ranges = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if is_terminal(c) {
            let prev_digit = i > 0 && bytes[i - 1].1.is_ascii_digit();
            let next_digit = i + 1 < bytes.len() && bytes[i + 1].1.is_ascii_digit();
            if c == '.' && prev_digit && next_digit {
                i += 1;
                continue;
            }
            // swallow the rest of the terminal run and any closers
            let mut j = i + 1;
            while j < bytes.len() && (is_terminal(bytes[j].1) || is_closer(bytes[j].1)) {
                j += 1;
            }
            let at_break = j >= bytes.len() || bytes[j].1.is_whitespace();
            if at_break {
                let end = if j < bytes.len() { bytes[j].0 } else { text.len() };
                ranges.push((start, end));
                // skip the whitespace run
                while j < bytes.len() && bytes[j].1.is_whitespace() {
                    j += 1;
                }
                start = if j < bytes.len() { bytes[j].0 } else { text.len() };
                i = j;
                continue;
            }
            i = j;
            continue;
        }
        i += 1;
        let _ = pos;
    }
    if start < text.len() {
        ranges.push((start, text.len()));
    }
    ranges
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn tokenize_range(
    text: &str,
    start: usize,
    end: usize,
    tokens: &mut Vec<String>,
    offsets: &mut Vec<(usize, usize)>,
) {
    let slice = &text[start..end];
    let chars: Vec<(usize, char)> = slice.char_indices().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_word_char(c) {
            let run_start = i;
            let mut j = i + 1;
            while j < chars.len() {
                let cj = chars[j].1;
                if is_word_char(cj) {
                    j += 1;
                    continue;
                }
                // joiners that stay inside a word run
                let prev_word = is_word_char(chars[j - 1].1);
                let next_word = j + 1 < chars.len() && is_word_char(chars[j + 1].1);
                let joins = match cj {
                    '\'' | '\u{2019}' => prev_word && next_word,
                    '-' => prev_word && next_word,
                    '.' | ',' => {
                        chars[j - 1].1.is_ascii_digit()
                            && j + 1 < chars.len()
                            && chars[j + 1].1.is_ascii_digit()
                    }
                    _ => false,
                };
                if joins {
                    j += 2;
                } else {
                    break;
                }
            }
            let run_byte_start = start + chars[run_start].0;
            let run_byte_end = if j < chars.len() {
                start + chars[j].0
            } else {
                end
            };
            push_word(text, run_byte_start, run_byte_end, tokens, offsets);
            i = j;
            let _ = pos;
        } else {
            let byte_start = start + pos;
            let byte_end = byte_start + c.len_utf8();
            tokens.push(text[byte_start..byte_end].to_string());
            offsets.push((byte_start, byte_end));
            i += 1;
        }
    }
}

/// Pushes a word run, applying contraction splits so the pieces remain exact
/// slices: `don't` -> `do` + `n't`, `we'll` -> `we` + `'ll`.
fn push_word(
    text: &str,
    start: usize,
    end: usize,
    tokens: &mut Vec<String>,
    offsets: &mut Vec<(usize, usize)>,
) {
    let word = &text[start..end];
    if let Some(split_at) = contraction_split(word) {
        let mid = start + split_at;
        tokens.push(text[start..mid].to_string());
        offsets.push((start, mid));
        tokens.push(text[mid..end].to_string());
        offsets.push((mid, end));
    } else {
        tokens.push(word.to_string());
        offsets.push((start, end));
    }
}

/// Byte position to split a contraction at, if any.
fn contraction_split(word: &str) -> Option<usize> {
    let lower = word.to_lowercase();
    if lower.len() == word.len() {
        if lower.len() > 3 && lower.ends_with("n't") {
            return Some(word.len() - 3);
        }
        for suffix in ["'ll", "'re", "'ve", "'em", "'s", "'d", "'m"] {
            if lower.len() > suffix.len() && lower.ends_with(suffix) {
                return Some(word.len() - suffix.len());
            }
        }
    }
    None
}
