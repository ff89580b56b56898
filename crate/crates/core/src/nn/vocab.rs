use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAD: usize = 0;
pub const BOS: usize = 1;
pub const EOS: usize = 2;
pub const UNK: usize = 3;

const SPECIALS: [&str; 4] = ["<pad>", "<bos>", "<eos>", "<unk>"];

/// Closed token vocabulary with reserved specials at fixed ids. Tokens are
/// stored lowercased; lookup lowercases its argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocab {
    tokens: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocab {
    /// Builds a vocabulary from token streams, ordered by descending
    /// frequency with alphabetical tie-break for determinism.
    pub fn build<'a, I: IntoIterator<Item = &'a str>>(tokens: I) -> Self {
        let mut counts: HashMap<String, usize> = HashMap::new();
        for t in tokens {
            *counts.entry(t.to_lowercase()).or_insert(0) += 1;
        }
        for s in SPECIALS {
            counts.remove(s);
        }
        let mut entries: Vec<(String, usize)> = counts.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut all: Vec<String> = SPECIALS.iter().map(|s| s.to_string()).collect();
        all.extend(entries.into_iter().map(|(t, _)| t));
        Self::from_tokens(all)
    }

    fn from_tokens(tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> usize {
        self.index
            .get(&token.to_lowercase())
            .copied()
            .unwrap_or(UNK)
    }

    pub fn token(&self, id: usize) -> &str {
        self.tokens.get(id).map_or("<unk>", |s| s.as_str())
    }

    /// Encodes a token sequence, optionally wrapping in BOS/EOS.
    pub fn encode(&self, tokens: &[String], wrap: bool) -> Vec<usize> {
        let mut ids = Vec::with_capacity(tokens.len() + 2);
        if wrap {
            ids.push(BOS);
        }
        ids.extend(tokens.iter().map(|t| self.id(t)));
        if wrap {
            ids.push(EOS);
        }
        ids
    }

    /// Decodes ids back to tokens, dropping specials.
    pub fn decode(&self, ids: &[usize]) -> Vec<String> {
        ids.iter()
            .filter(|&&id| id >= SPECIALS.len())
            .map(|&id| self.token(id).to_string())
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(&self.tokens)
            .map_err(|e| Error::Other(format!("serialize vocab: {e}")))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let data = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let tokens: Vec<String> = serde_json::from_str(&data)
            .map_err(|e| Error::Checkpoint(format!("vocab file {}: {e}", path.display())))?;
        for (i, s) in SPECIALS.iter().enumerate() {
            if tokens.get(i).map(String::as_str) != Some(*s) {
                return Err(Error::Checkpoint(format!(
                    "vocab file {} missing special {s} at id {i}",
                    path.display()
                )));
            }
        }
        Ok(Self::from_tokens(tokens))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn specials_get_fixed_ids() {
        let v = Vocab::build(["we", "use", "cookies"]);
        assert_eq!(v.id("<pad>"), PAD);
        assert_eq!(v.id("<bos>"), BOS);
        assert_eq!(v.id("<eos>"), EOS);
        assert_eq!(v.id("<unk>"), UNK);
        assert_eq!(v.len(), 7);
    }

    #[test]
    fn lookup_is_case_insensitive_and_unk_fallback() {
        let v = Vocab::build(["We", "use", "Cookies"]);
        assert_eq!(v.id("COOKIES"), v.id("cookies"));
        assert_eq!(v.id("zebra"), UNK);
    }

    #[test]
    fn frequency_then_alphabetical_ordering() {
        let v = Vocab::build(["b", "a", "b", "c", "a", "b"]);
        // b (3) before a (2) before c (1)
        assert!(v.id("b") < v.id("a"));
        assert!(v.id("a") < v.id("c"));
    }

    #[test]
    fn encode_decode_round_trip() {
        let v = Vocab::build(["we", "use", "cookies"]);
        let toks = vec!["we".to_string(), "use".to_string(), "cookies".to_string()];
        let ids = v.encode(&toks, true);
        assert_eq!(ids[0], BOS);
        assert_eq!(*ids.last().unwrap(), EOS);
        assert_eq!(v.decode(&ids), toks);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("vocab.json");
        let v = Vocab::build(["alpha", "beta", "beta"]);
        v.save(&path).unwrap();
        let loaded = Vocab::load(&path).unwrap();
        assert_eq!(v, loaded);
        assert_eq!(loaded.id("beta"), v.id("beta"));
    }

    #[test]
    fn corrupt_vocab_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("vocab.json");
        std::fs::write(&path, r#"["a","b"]"#).unwrap();
        assert!(Vocab::load(&path).is_err());
    }
}
