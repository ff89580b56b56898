use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::span::EntitySpan;
use super::text::{tokenize, TokenizedText};

/// Where a document's entity annotations came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Gold,
    Pseudo,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Gold => "gold",
            Provenance::Pseudo => "pseudo",
        }
    }
}

/// One line of the JSONL corpus format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub text: String,
    pub entities: Vec<EntitySpan>,
    pub summary: String,
    #[serde(default)]
    pub summary_entities: Vec<EntitySpan>,
    #[serde(default)]
    pub entity_provenance: Provenance,
}

/// A corpus document with its tokenizations materialized. Entity token
/// indices refer to this crate's own tokenization of `text` / `summary`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedDocument {
    pub id: String,
    pub text: TokenizedText,
    pub entities: Vec<EntitySpan>,
    pub summary: TokenizedText,
    pub summary_entities: Vec<EntitySpan>,
    pub provenance: Provenance,
}

impl AnnotatedDocument {
    /// Tokenizes a wire record and validates every span against the token
    /// counts it indexes into.
    pub fn from_record(record: Record) -> Result<Self> {
        let text = tokenize(&record.text);
        let summary = tokenize(&record.summary);
        check_spans(&record.entities, text.n_tokens(), &record.id, "text")?;
        check_spans(
            &record.summary_entities,
            summary.n_tokens(),
            &record.id,
            "summary",
        )?;
        Ok(Self {
            id: record.id,
            text,
            entities: record.entities,
            summary,
            summary_entities: record.summary_entities,
            provenance: record.entity_provenance,
        })
    }

    pub fn to_record(&self) -> Record {
        Record {
            id: self.id.clone(),
            text: self.text.raw.clone(),
            entities: self.entities.clone(),
            summary: self.summary.raw.clone(),
            summary_entities: self.summary_entities.clone(),
            entity_provenance: self.provenance,
        }
    }

    /// Surface form of a text entity span.
    pub fn entity_surface(&self, span: &EntitySpan) -> &str {
        self.text.surface(span.b, span.e).unwrap_or("")
    }
}

fn check_spans(spans: &[EntitySpan], n_tokens: usize, id: &str, field: &str) -> Result<()> {
    for span in spans {
        if span.b > span.e || span.e >= n_tokens {
            return Err(Error::Other(format!(
                "document {id}: {field} span ({}, {}) out of range for {n_tokens} tokens",
                span.b, span.e
            )));
        }
    }
    Ok(())
}
