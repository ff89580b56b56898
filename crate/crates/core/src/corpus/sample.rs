use super::doc::{AnnotatedDocument, Provenance, Record};
use super::label::EntityLabel;
use super::span::EntitySpan;
use super::text::{tokenize, TokenizedText};

/// Finds the `occurrence`-th (0-based) match of `phrase`'s token sequence
/// inside `text` and returns its inclusive token span. Panics when absent;
/// the builder below only queries phrases it just wrote.
fn find_span(text: &TokenizedText, phrase: &str, occurrence: usize) -> (usize, usize) {
    let needle = tokenize(phrase).tokens;
    assert!(!needle.is_empty(), "empty phrase");
    let mut seen = 0usize;
    let n = text.tokens.len();
    for b in 0..n {
        if b + needle.len() > n {
            break;
        }
        if text.tokens[b..b + needle.len()] == needle[..] {
            if seen == occurrence {
                return (b, b + needle.len() - 1);
            }
            seen += 1;
        }
    }
    panic!("phrase {phrase:?} (occurrence {occurrence}) not found");
}

struct Draft {
    id: &'static str,
    text: &'static str,
    entities: &'static [(&'static str, usize, EntityLabel)],
    summary: &'static str,
    summary_entities: &'static [(&'static str, usize, EntityLabel)],
}

fn build(draft: &Draft) -> AnnotatedDocument {
    let text = tokenize(draft.text);
    let summary = tokenize(draft.summary);
    let resolve = |toks: &TokenizedText, specs: &[(&str, usize, EntityLabel)]| {
        let mut spans: Vec<EntitySpan> = specs
            .iter()
            .map(|&(phrase, occ, label)| {
                let (b, e) = find_span(toks, phrase, occ);
                EntitySpan::new(b, e, label)
            })
            .collect();
        spans.sort();
        spans
    };
    let entities = resolve(&text, draft.entities);
    let summary_entities = resolve(&summary, draft.summary_entities);
    AnnotatedDocument::from_record(Record {
        id: draft.id.to_string(),
        text: draft.text.to_string(),
        entities,
        summary: draft.summary.to_string(),
        summary_entities,
        entity_provenance: Provenance::Gold,
    })
    .expect("sample document must validate")
}

use EntityLabel::*;

const DRAFTS: &[Draft] = &[
    Draft {
        id: "sample-01",
        text: "We collect your email address and name when you register. We use this information to provide our services.",
        entities: &[
            ("email address", 0, DataCompulsory),
            ("name", 0, DataCompulsory),
            ("you", 0, SourceDirect),
            ("to provide our services", 0, Reason),
        ],
        summary: "Collects email address and name from you to provide services.",
        summary_entities: &[
            ("email address", 0, DataCompulsory),
            ("name", 0, DataCompulsory),
            ("you", 0, SourceDirect),
        ],
    },
    Draft {
        id: "sample-02",
        text: "You may add a phone number and a profile photo to your account. These details are optional and stored on our servers.",
        entities: &[
            ("You", 0, SourceDirect),
            ("phone number", 0, DataOptional),
            ("profile photo", 0, DataOptional),
            ("our servers", 0, TargetDirect),
        ],
        summary: "You may share a phone number and profile photo.",
        summary_entities: &[("You", 0, SourceDirect)],
    },
    Draft {
        id: "sample-03",
        text: "We use cookies and web beacons to track usage data across the site. This usage data helps us improve our services.",
        entities: &[
            ("cookies", 0, Medium),
            ("web beacons", 0, Medium),
            ("usage data", 0, DataOther),
            ("usage data", 1, DataOther),
            ("improve our services", 0, Reason),
        ],
        summary: "Uses cookies and web beacons to collect usage data.",
        summary_entities: &[
            ("cookies", 0, Medium),
            ("web beacons", 0, Medium),
            ("usage data", 0, DataOther),
        ],
    },
    Draft {
        id: "sample-04",
        text: "We receive information about you from data brokers and social networks. Such third parties may supply your browsing history.",
        entities: &[
            ("you", 0, SourceDirect),
            ("data brokers", 0, SourceIndirect),
            ("social networks", 0, SourceIndirect),
            ("third parties", 0, SourceIndirect),
            ("browsing history", 0, DataOther),
        ],
        summary: "Receives browsing history about you from other companies.",
        summary_entities: &[
            ("browsing history", 0, DataOther),
            ("you", 0, SourceDirect),
        ],
    },
    Draft {
        id: "sample-05",
        text: "Your payment details are shared with our billing processor for fraud prevention. We never sell personal data to advertising partners.",
        entities: &[
            ("payment details", 0, DataCompulsory),
            ("billing processor", 0, TargetIndirect),
            ("fraud prevention", 0, Reason),
            ("personal data", 0, DataOther),
            ("advertising partners", 0, TargetIndirect),
        ],
        summary: "Shares payment details with a billing processor for fraud prevention.",
        summary_entities: &[
            ("payment details", 0, DataCompulsory),
            ("billing processor", 0, TargetIndirect),
            ("fraud prevention", 0, Reason),
        ],
    },
    Draft {
        id: "sample-06",
        text: "The app records your location when you enable navigation. Location records stay on our servers for ninety days.",
        entities: &[
            ("location", 0, DataOptional),
            ("you", 0, SourceDirect),
            ("our servers", 0, TargetDirect),
        ],
        summary: "Records location on our servers when navigation is enabled.",
        summary_entities: &[("our servers", 0, TargetDirect)],
    },
    Draft {
        id: "sample-07",
        text: "We collect your name and email address so that our support team can answer questions. Analytics providers receive anonymous usage data.",
        entities: &[
            ("name", 0, DataCompulsory),
            ("email address", 0, DataCompulsory),
            ("our support team", 0, TargetDirect),
            ("Analytics providers", 0, TargetIndirect),
            ("usage data", 0, DataOther),
        ],
        summary: "Collects name and email address for support while analytics providers get usage data.",
        summary_entities: &[
            ("name", 0, DataCompulsory),
            ("email address", 0, DataCompulsory),
            ("analytics providers", 0, TargetIndirect),
            ("usage data", 0, DataOther),
        ],
    },
    Draft {
        id: "sample-08",
        text: "Surveys are voluntary and may ask for your age and interests. Responses help us improve our services.",
        entities: &[
            ("age", 0, DataOptional),
            ("interests", 0, DataOptional),
            ("improve our services", 0, Reason),
        ],
        summary: "Voluntary surveys collect age and interests to improve our services.",
        summary_entities: &[("improve our services", 0, Reason)],
    },
    Draft {
        id: "sample-09",
        text: "We log device information such as browser type whenever you visit. These logs protect the site against abuse.",
        entities: &[
            ("device information", 0, DataOther),
            ("browser type", 0, DataOther),
            ("you", 0, SourceDirect),
            ("protect the site against abuse", 0, Reason),
        ],
        summary: "Logs device information and browser type from you for site protection.",
        summary_entities: &[
            ("device information", 0, DataOther),
            ("browser type", 0, DataOther),
            ("you", 0, SourceDirect),
        ],
    },
    Draft {
        id: "sample-10",
        text: "We gather feedback through surveys and email forms. Feedback goes to our product team to improve our services.",
        entities: &[
            ("surveys", 0, Medium),
            ("email forms", 0, Medium),
            ("feedback", 0, DataOther),
            ("our product team", 0, TargetDirect),
            ("improve our services", 0, Reason),
        ],
        summary: "Gathers feedback through surveys and email forms to improve our services.",
        summary_entities: &[
            ("surveys", 0, Medium),
            ("email forms", 0, Medium),
            ("improve our services", 0, Reason),
        ],
    },
];

/// A deterministic 10-document synthetic corpus exercising every entity
/// label, with spans derived from this crate's own tokenizer.
pub fn sample_corpus() -> Vec<AnnotatedDocument> {
    DRAFTS.iter().map(build).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::io::{retokenize_check, validate_corpus};
    use crate::corpus::label::ENTITY_LABELS;

    #[test]
    fn ten_documents() {
        assert_eq!(sample_corpus().len(), 10);
    }

    #[test]
    fn covers_every_entity_label() {
        let docs = sample_corpus();
        for label in ENTITY_LABELS {
            let found = docs
                .iter()
                .flat_map(|d| d.entities.iter())
                .any(|s| s.label == label);
            assert!(found, "label {label} missing from sample corpus");
        }
    }

    #[test]
    fn spans_survive_retokenization() {
        let docs = sample_corpus();
        assert!(retokenize_check(&docs).is_empty());
    }

    #[test]
    fn no_validation_warnings() {
        let docs = sample_corpus();
        let warnings = validate_corpus(&docs);
        assert!(warnings.is_empty(), "{warnings:?}");
    }

    #[test]
    fn surfaces_match_phrases() {
        let docs = sample_corpus();
        let d = &docs[0];
        let surfaces: Vec<&str> = d.entities.iter().map(|s| d.entity_surface(s)).collect();
        assert!(surfaces.contains(&"email address"));
        assert!(surfaces.contains(&"to provide our services"));
    }
}
