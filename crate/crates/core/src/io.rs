//! JSON encoding of mass functions and streams.
//!
//! ```json
//! {"frame": ["a", "b", "c"], "masses": {"a": 0.3, "a|c": 0.2, "*": 0.5}}
//! ```
//!
//! Keys are `|`-joined labels; `{}` is the empty set and `*` is accepted for
//! Ω. Output always spells Ω out and lists focal elements in canonical order.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::mass::MassFunction;

struct Masses<'a>(&'a MassFunction);

impl Serialize for Masses<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.0;
        let mut map = serializer.serialize_map(Some(m.focal_count()))?;
        for (s, x) in m.focal_elements() {
            map.serialize_entry(&m.frame().format_subset(s), &x)?;
        }
        map.end()
    }
}

impl Serialize for MassFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("frame", self.frame())?;
        map.serialize_entry("masses", &Masses(self))?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMass {
    frame: Frame,
    masses: BTreeMap<String, f64>,
}

impl RawMass {
    fn into_mass(self, frame: Arc<Frame>) -> Result<MassFunction> {
        let entries = self
            .masses
            .iter()
            .map(|(key, &mass)| Ok((frame.parse_subset(key)?, mass)))
            .collect::<Result<Vec<_>>>()?;
        MassFunction::normalized_from(frame, entries)
    }
}

impl<'de> Deserialize<'de> for MassFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMass::deserialize(deserializer)?;
        let frame = Arc::new(raw.frame.clone());
        raw.into_mass(frame).map_err(D::Error::custom)
    }
}

/// Reads one mass function.
pub fn mass_from_json(text: &str) -> Result<MassFunction> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn mass_to_json(m: &MassFunction) -> String {
    serde_json::to_string_pretty(m).expect("mass functions always serialize")
}

/// Reads a JSON array of mass functions. All of them must share one frame,
/// which is allocated once for the whole stream.
pub fn stream_from_json(text: &str) -> Result<Vec<MassFunction>> {
    let raw: Vec<RawMass> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let Some(first) = raw.first() else {
        return Ok(Vec::new());
    };
    let frame = Arc::new(first.frame.clone());
    raw.into_iter()
        .map(|r| {
            if r.frame != *frame {
                return Err(Error::FrameMismatch);
            }
            r.into_mass(frame.clone())
        })
        .collect()
}

pub fn stream_to_json(ms: &[MassFunction]) -> String {
    serde_json::to_string_pretty(ms).expect("mass functions always serialize")
}

/// Accepts either a single mass-function object or an array of them.
pub fn masses_from_json(text: &str) -> Result<Vec<MassFunction>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        stream_from_json(text)
    } else {
        mass_from_json(text).map(|m| vec![m])
    }
}
