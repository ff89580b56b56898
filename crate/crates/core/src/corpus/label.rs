use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// The closed set of privacy-entity labels, plus the reserved non-entity
/// value [`EntityLabel::Invalid`] used by span classifiers for spans that are
/// not entities. `Invalid` is never persisted in gold annotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityLabel {
    Invalid,
    DataCompulsory,
    DataOptional,
    DataOther,
    SourceDirect,
    SourceIndirect,
    TargetDirect,
    TargetIndirect,
    Reason,
    Medium,
}

/// The nine real entity labels, in classifier-index order (index 1..=9).
pub const ENTITY_LABELS: [EntityLabel; 9] = [
    EntityLabel::DataCompulsory,
    EntityLabel::DataOptional,
    EntityLabel::DataOther,
    EntityLabel::SourceDirect,
    EntityLabel::SourceIndirect,
    EntityLabel::TargetDirect,
    EntityLabel::TargetIndirect,
    EntityLabel::Reason,
    EntityLabel::Medium,
];

/// All ten label values including `Invalid` (index 0).
pub const ALL_LABELS: [EntityLabel; 10] = [
    EntityLabel::Invalid,
    EntityLabel::DataCompulsory,
    EntityLabel::DataOptional,
    EntityLabel::DataOther,
    EntityLabel::SourceDirect,
    EntityLabel::SourceIndirect,
    EntityLabel::TargetDirect,
    EntityLabel::TargetIndirect,
    EntityLabel::Reason,
    EntityLabel::Medium,
];

/// Number of classes seen by span classifiers (nine labels + invalid).
pub const NUM_CLASSES: usize = 10;

impl EntityLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntityLabel::Invalid => "invalid",
            EntityLabel::DataCompulsory => "data-compulsory",
            EntityLabel::DataOptional => "data-optional",
            EntityLabel::DataOther => "data-other",
            EntityLabel::SourceDirect => "source-direct",
            EntityLabel::SourceIndirect => "source-indirect",
            EntityLabel::TargetDirect => "target-direct",
            EntityLabel::TargetIndirect => "target-indirect",
            EntityLabel::Reason => "reason",
            EntityLabel::Medium => "medium",
        }
    }

    /// Classifier class index; `Invalid` is 0.
    pub fn index(&self) -> usize {
        ALL_LABELS.iter().position(|l| l == self).unwrap()
    }

    pub fn from_index(index: usize) -> Option<EntityLabel> {
        ALL_LABELS.get(index).copied()
    }

    /// True for the nine real entity labels, false for `Invalid`.
    pub fn is_entity(&self) -> bool {
        *self != EntityLabel::Invalid
    }
}

impl FromStr for EntityLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_LABELS
            .iter()
            .find(|l| l.as_str() == s)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

impl fmt::Display for EntityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for EntityLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for EntityLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LabelVisitor;

        impl Visitor<'_> for LabelVisitor {
            type Value = EntityLabel;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an entity label string")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<EntityLabel, E> {
                EntityLabel::from_str(v).map_err(|_| E::custom(format!("unknown label \"{v}\"")))
            }
        }

        deserializer.deserialize_str(LabelVisitor)
    }
}
