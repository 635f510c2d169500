use serde::{Deserialize, Serialize};

use super::prompt::{COMPLETED_MARKER, TAG_MARKER};
use crate::ontology::{Level2Label, RoutingSet};

/// What a single classification exchange produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Outcome {
    ParsedTag(Level2Label),
    /// The extracted tag text, empty when no tag field was found.
    Refusal(String),
    TransportError(String),
}

impl Outcome {
    pub fn tag(&self) -> Option<Level2Label> {
        match self {
            Outcome::ParsedTag(t) => Some(*t),
            _ => None,
        }
    }

    pub fn is_refusal(&self) -> bool {
        matches!(self, Outcome::Refusal(_))
    }
}

/// Extracts the tag field of a structured response and checks it against
/// the routing set.
///
/// The tag is the first non-empty line after the last tag marker, stopping
/// at the completion marker. Anything outside the routing set is a refusal.
pub fn parse_response(raw: &str, routing: &RoutingSet) -> Outcome {
    let Some(pos) = raw.rfind(TAG_MARKER) else {
        return Outcome::Refusal(String::new());
    };
    let rest = &raw[pos + TAG_MARKER.len()..];
    let rest = rest.find(COMPLETED_MARKER).map_or(rest, |end| &rest[..end]);
    let line = rest.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    match routing.match_tag(line) {
        Some(tag) => Outcome::ParsedTag(tag),
        None => Outcome::Refusal(line.to_string()),
    }
}
