use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::doc::{AnnotatedDocument, Record};
use super::label::EntityLabel;
use super::span::EntitySpan;

/// Loads a JSON-Lines corpus. Every error names the 1-based line it came
/// from. Blank lines are skipped.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<AnnotatedDocument>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut docs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line)
            .map_err(|e| Error::corpus(line_no, format!("malformed record: {e}")))?;
        check_record_spans(&record, line_no)?;
        let doc = AnnotatedDocument::from_record(record)
            .map_err(|e| Error::corpus(line_no, e.to_string()))?;
        docs.push(doc);
    }
    Ok(docs)
}

/// Validates record spans against the record's own tokenization, emitting
/// the canonical out-of-range message.
fn check_record_spans(record: &Record, line_no: usize) -> Result<()> {
    let n_text = super::text::tokenize(&record.text).n_tokens();
    let n_summary = super::text::tokenize(&record.summary).n_tokens();
    for span in &record.entities {
        if span.b > span.e || span.e >= n_text {
            return Err(Error::corpus(line_no, "span out of range"));
        }
    }
    for span in &record.summary_entities {
        if span.b > span.e || span.e >= n_summary {
            return Err(Error::corpus(line_no, "span out of range"));
        }
    }
    Ok(())
}

/// Writes documents as JSON Lines, one record per document.
pub fn save_corpus(path: impl AsRef<Path>, docs: &[AnnotatedDocument]) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for doc in docs {
        let json = serde_json::to_string(&doc.to_record())
            .map_err(|e| Error::Other(format!("serialize {}: {e}", doc.id)))?;
        writeln!(writer, "{json}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Verifies that every entity span maps to a well-formed surface under the
/// document's own tokenization: re-tokenizing the surface must reproduce the
/// span's tokens. Returns the ids of documents that fail.
pub fn retokenize_check(docs: &[AnnotatedDocument]) -> Vec<String> {
    let mut bad = Vec::new();
    for doc in docs {
        let mut ok = true;
        for (toks, spans) in [
            (&doc.text, &doc.entities),
            (&doc.summary, &doc.summary_entities),
        ] {
            for span in spans.iter() {
                let surface = match toks.surface(span.b, span.e) {
                    Some(s) => s,
                    None => {
                        ok = false;
                        continue;
                    }
                };
                let retok = super::text::tokenize(surface);
                let expected = &toks.tokens[span.b..=span.e];
                if retok.tokens != expected {
                    ok = false;
                }
            }
        }
        if !ok {
            bad.push(doc.id.clone());
        }
    }
    bad
}

/// Non-fatal oddities found in a loaded corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationWarning {
    pub doc_id: String,
    pub message: String,
}

impl std::fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.doc_id, self.message)
    }
}

/// Checks annotation conventions that should hold for gold data. Summaries
/// are not expected to carry data-optional or source-indirect labels; their
/// appearance is reported but tolerated.
pub fn validate_corpus(docs: &[AnnotatedDocument]) -> Vec<ValidationWarning> {
    let mut warnings = Vec::new();
    for doc in docs {
        for span in &doc.summary_entities {
            if matches!(
                span.label,
                EntityLabel::DataOptional | EntityLabel::SourceIndirect
            ) {
                warnings.push(ValidationWarning {
                    doc_id: doc.id.clone(),
                    message: format!("summary span ({}, {}) carries label {}", span.b, span.e, span.label),
                });
            }
        }
        warn_overlaps(&doc.entities, "text", doc, &mut warnings);
        warn_overlaps(&doc.summary_entities, "summary", doc, &mut warnings);
    }
    warnings
}

fn warn_overlaps(
    spans: &[EntitySpan],
    field: &str,
    doc: &AnnotatedDocument,
    warnings: &mut Vec<ValidationWarning>,
) {
    let mut sorted: Vec<&EntitySpan> = spans.iter().collect();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[0].overlaps(pair[1]) {
            warnings.push(ValidationWarning {
                doc_id: doc.id.clone(),
                message: format!(
                    "{field} spans ({}, {}) and ({}, {}) overlap",
                    pair[0].b, pair[0].e, pair[1].b, pair[1].e
                ),
            });
        }
    }
}
