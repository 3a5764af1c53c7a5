//! Frames of discernment and the subset algebra over them.
//!
//! A [`Frame`] is an ordered list of hypothesis labels. Subsets of a frame are
//! bit patterns: bit `i` is set when the `i`-th label is a member. Every dense
//! layout in the crate (commonality vectors, the Jaccard matrix, weight
//! tables) indexes subsets by that bit value, in ascending order.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported frame size. Dense transforms allocate `2^N` entries.
pub const MAX_FRAME_SIZE: usize = 20;

/// An ordered set of distinct hypothesis labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidFrame("a frame needs at least one label".into()));
        }
        if labels.len() > MAX_FRAME_SIZE {
            return Err(Error::InvalidFrame(format!(
                "{} labels exceed the maximum of {MAX_FRAME_SIZE}",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.contains('|') || label == "*" || label == "{}" {
                return Err(Error::InvalidFrame(format!("label {label:?} is reserved or empty")));
            }
            if labels[..i].contains(label) {
                return Err(Error::InvalidFrame(format!("duplicate label {label:?}")));
            }
        }
        Ok(Frame { labels })
    }

    /// Frame with labels `w1, …, wN`.
    pub fn with_size(n: usize) -> Result<Self> {
        Frame::new((1..=n).map(|i| format!("w{i}")))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of subsets, `2^N`.
    pub fn powerset_len(&self) -> usize {
        1 << self.size()
    }

    pub fn empty(&self) -> Subset {
        Subset::EMPTY
    }

    /// The whole frame Ω.
    pub fn full(&self) -> Subset {
        Subset((1u32 << self.size()) - 1)
    }

    pub fn singleton(&self, index: usize) -> Result<Subset> {
        if index >= self.size() {
            return Err(Error::SubsetOutOfFrame { bits: 1 << index.min(31), size: self.size() });
        }
        Ok(Subset(1 << index))
    }

    pub fn contains(&self, subset: Subset) -> bool {
        subset.0 & !self.full().0 == 0
    }

    pub fn check(&self, subset: Subset) -> Result<Subset> {
        if self.contains(subset) {
            Ok(subset)
        } else {
            Err(Error::SubsetOutOfFrame { bits: subset.0, size: self.size() })
        }
    }

    pub fn complement(&self, subset: Subset) -> Subset {
        Subset(self.full().0 & !subset.0)
    }

    /// All `2^N` subsets in ascending bit order: ∅ first, Ω last.
    pub fn subsets(&self) -> impl ExactSizeIterator<Item = Subset> + Clone {
        (0..self.powerset_len() as u32).map(Subset)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Subset built from member labels.
    pub fn subset_of<S: AsRef<str>>(&self, members: &[S]) -> Result<Subset> {
        members.iter().try_fold(Subset::EMPTY, |acc, label| {
            let label = label.as_ref();
            self.label_index(label)
                .map(|i| acc.union(Subset(1 << i)))
                .ok_or_else(|| Error::Parse(format!("unknown label {label:?}")))
        })
    }

    /// Parses `"a|c"`, `"{}"` (∅), `"*"` (Ω), a single label, or a bitstring
    /// of length N whose first character stands for the first label.
    pub fn parse_subset(&self, text: &str) -> Result<Subset> {
        let text = text.trim();
        match text {
            "{}" | "∅" => return Ok(Subset::EMPTY),
            "*" | "Ω" => return Ok(self.full()),
            _ => {}
        }
        let parts: Vec<&str> = text.split('|').map(str::trim).collect();
        if let Ok(subset) = self.subset_of(&parts) {
            return Ok(subset);
        }
        if text.len() == self.size() && text.bytes().all(|b| b == b'0' || b == b'1') {
            let bits = text
                .bytes()
                .enumerate()
                .filter(|&(_, b)| b == b'1')
                .fold(0u32, |acc, (i, _)| acc | (1 << i));
            return Ok(Subset(bits));
        }
        Err(Error::Parse(format!("cannot read {text:?} as a subset of {:?}", self.labels)))
    }

    /// Member labels in frame order.
    pub fn members(&self, subset: Subset) -> Vec<&str> {
        subset.indices().map(|i| self.labels[i].as_str()).collect()
    }

    /// `"|"`-joined member labels; `"{}"` for ∅.
    pub fn format_subset(&self, subset: Subset) -> String {
        if subset.is_empty() {
            "{}".to_string()
        } else {
            self.members(subset).join("|")
        }
    }

    /// Subset as a bitstring, first label first.
    pub fn bitstring(&self, subset: Subset) -> String {
        (0..self.size()).map(|i| if subset.has(i) { '1' } else { '0' }).collect()
    }
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(deserializer)?;
        Frame::new(labels).map_err(serde::de::Error::custom)
    }
}

/// A subset of a frame, encoded as a bit pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    pub fn has(self, element: usize) -> bool {
        element < 32 && self.0 & (1 << element) != 0
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    /// Indices of member elements, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Jaccard similarity `|A∩B| / |A∪B|`, with the convention that two empty
/// sets are identical (similarity 1).
pub fn jaccard_index(a: Subset, b: Subset) -> f64 {
    let union = a.union(b);
    if union.is_empty() {
        1.0
    } else {
        f64::from(a.intersection(b).cardinality()) / f64::from(union.cardinality())
    }
}

/// [`jaccard_index`] with both operands checked against `frame`.
pub fn jaccard_index_in(frame: &Frame, a: Subset, b: Subset) -> Result<f64> {
    frame.check(a)?;
    frame.check(b)?;
    Ok(jaccard_index(a, b))
}

/// All subsets of `frame` in canonical (ascending bit) order.
pub fn enumerate_subsets(frame: &Frame) -> Vec<Subset> {
    frame.subsets().collect()
}
