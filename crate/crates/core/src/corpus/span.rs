use serde::{Deserialize, Serialize};

use super::label::EntityLabel;

/// A labeled entity span over token indices, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    /// First token index.
    pub b: usize,
    /// Last token index (inclusive), `b <= e`.
    pub e: usize,
    pub label: EntityLabel,
}

impl EntitySpan {
    pub fn new(b: usize, e: usize, label: EntityLabel) -> Self {
        Self { b, e, label }
    }

    /// Number of tokens covered.
    pub fn width(&self) -> usize {
        self.e - self.b + 1
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.b <= other.e && other.b <= self.e
    }

    /// Same token boundaries, label ignored.
    pub fn same_extent(&self, other: &EntitySpan) -> bool {
        self.b == other.b && self.e == other.e
    }
}
