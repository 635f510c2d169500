//! The two-level label system for congressional bills.
//!
//! Six top-level classes each own a fixed set of subclasses. Every subclass
//! has exactly one parent, which is what lets a level-two prediction be
//! projected back onto its level-one span for alignment and scoring.
//!
//! Identifiers are emitted with their canonical spelling and parsed
//! case-insensitively, together with short codes, display names and aliases.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::OntologyError;

/// A top-level class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level1Label {
    Person,
    Organization,
    Document,
    Act,
    Abstraction,
    Class,
}

impl Level1Label {
    pub const ALL: [Level1Label; 6] = [
        Level1Label::Person,
        Level1Label::Organization,
        Level1Label::Document,
        Level1Label::Act,
        Level1Label::Abstraction,
        Level1Label::Class,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Level1Label::Person => "Person",
            Level1Label::Organization => "Organization",
            Level1Label::Document => "Document",
            Level1Label::Act => "Act",
            Level1Label::Abstraction => "Abstraction",
            Level1Label::Class => "Class",
        }
    }

    /// Three-letter abbreviation used in annotation guidelines.
    pub fn short_code(self) -> &'static str {
        match self {
            Level1Label::Person => "PER",
            Level1Label::Organization => "ORG",
            Level1Label::Document => "DOC",
            Level1Label::Act => "ACT",
            Level1Label::Abstraction => "ABS",
            Level1Label::Class => "CLS",
        }
    }

    /// All subclasses of this class, in ontology order.
    pub fn children(self) -> impl Iterator<Item = Level2Label> {
        Level2Label::ALL.into_iter().filter(move |s| s.parent() == self)
    }

    /// Subclasses offered to the level-two classifier for mentions of this class.
    pub fn routing_set(self) -> RoutingSet {
        routing_set(self)
    }
}

impl fmt::Display for Level1Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level1Label {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match resolve_label(s)? {
            Label::Level1(l) => Ok(l),
            Label::Level2(_) => Err(OntologyError::WrongLevel(s.to_string())),
        }
    }
}

/// A subclass. The canonical identifier is the spelling used in level-two tag
/// files and in the classifier's list of possible tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level2Label {
    // Person
    Member,
    Title,
    Name,
    // Organization
    Nation,
    State,
    Locality,
    Committee,
    Agency,
    LegislativeBody,
    InternationalInstitution,
    Association,
    // Document
    Code,
    Bill,
    Reference,
    Parenthetical,
    Treaty,
    Report,
    // Act
    PublicAct,
    Amendment,
    // Abstraction
    Program,
    Session,
    System,
    Infrastructure,
    Fund,
    Doctrine,
    Specification,
    Case,
    Misc,
    // Class
    ProtectedClass,
    #[serde(rename = "Non-ProtectedClass")]
    NonProtectedClass,
}

struct SubclassInfo {
    label: Level2Label,
    parent: Level1Label,
    prompt_name: &'static str,
    short_code: &'static str,
    display_name: &'static str,
    aliases: &'static [&'static str],
}

macro_rules! subclass {
    ($label:ident, $parent:ident, $prompt:literal, $code:literal, $display:literal $(, $alias:literal)*) => {
        SubclassInfo {
            label: Level2Label::$label,
            parent: Level1Label::$parent,
            prompt_name: $prompt,
            short_code: $code,
            display_name: $display,
            aliases: &[$($alias),*],
        }
    };
}

// Order matches the `Level2Label` declaration so the table can be indexed by discriminant.
static SUBCLASSES: [SubclassInfo; 30] = [
    subclass!(Member, Person, "Member", "MBC", "Member"),
    subclass!(Title, Person, "Title", "TTL", "Title"),
    subclass!(Name, Person, "Name", "IND", "Name", "Individual"),
    subclass!(Nation, Organization, "Nation", "NAT", "Nation"),
    subclass!(State, Organization, "State", "STA", "State"),
    subclass!(Locality, Organization, "Locality", "LOC", "Locality"),
    subclass!(Committee, Organization, "Committee", "COM", "Committee"),
    subclass!(Agency, Organization, "Agency", "AGC", "Agency"),
    subclass!(LegislativeBody, Organization, "LegislativeBody", "LEG", "Legislative Body", "Leg. Body"),
    subclass!(InternationalInstitution, Organization, "InternationalInstitution", "INT", "International Institution", "International"),
    subclass!(Association, Organization, "Association", "ASC", "Association"),
    subclass!(Code, Document, "Code", "CODE", "Code"),
    subclass!(Bill, Document, "Bill", "BILL", "Bill"),
    subclass!(Reference, Document, "Reference", "REF", "Reference"),
    subclass!(Parenthetical, Document, "Parenthetical", "PAR", "Parenthetical"),
    subclass!(Treaty, Document, "Treaty", "TRE", "Treaty"),
    subclass!(Report, Document, "Report", "REP", "Report"),
    subclass!(PublicAct, Act, "PublicAct", "PA", "Public Act"),
    subclass!(Amendment, Act, "Amendment", "AMD", "Amendment"),
    subclass!(Program, Abstraction, "Program", "PRO", "Program"),
    subclass!(Session, Abstraction, "Session", "SES", "Session"),
    subclass!(System, Abstraction, "System", "SYS", "System"),
    subclass!(Infrastructure, Abstraction, "Infrastructure", "INF", "Infrastructure"),
    subclass!(Fund, Abstraction, "Fund", "FUND", "Fund"),
    subclass!(Doctrine, Abstraction, "Doctrine", "DTR", "Doctrine"),
    subclass!(Specification, Abstraction, "Specification", "SPC", "Specification"),
    subclass!(Case, Abstraction, "Case", "CASE", "Case"),
    subclass!(Misc, Abstraction, "Misc", "MISC", "Misc"),
    subclass!(ProtectedClass, Class, "ProtectedClass", "PC", "Protected Class", "Protected"),
    subclass!(NonProtectedClass, Class, "Non-ProtectedClass", "NPC", "Non-Protected Class", "Non-Prot."),
];

impl Level2Label {
    pub const ALL: [Level2Label; 30] = {
        let mut all = [Level2Label::Member; 30];
        let mut i = 0;
        while i < 30 {
            all[i] = SUBCLASSES[i].label;
            i += 1;
        }
        all
    };

    fn info(self) -> &'static SubclassInfo {
        &SUBCLASSES[self as usize]
    }

    pub fn parent(self) -> Level1Label {
        self.info().parent
    }

    /// Canonical identifier; identical to [`Level2Label::prompt_name`].
    pub fn as_str(self) -> &'static str {
        self.info().prompt_name
    }

    pub fn prompt_name(self) -> &'static str {
        self.info().prompt_name
    }

    pub fn short_code(self) -> &'static str {
        self.info().short_code
    }

    /// Human-readable spelling as used in summary tables ("Public Act").
    pub fn display_name(self) -> &'static str {
        self.info().display_name
    }

    pub fn aliases(self) -> &'static [&'static str] {
        self.info().aliases
    }

    /// Whether the level-two classifier may ever emit this subclass.
    pub fn is_routable(self) -> bool {
        routing_set(self.parent()).contains(self)
    }
}

impl fmt::Display for Level2Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level2Label {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match resolve_label(s)? {
            Label::Level2(l) => Ok(l),
            Label::Level1(_) => Err(OntologyError::WrongLevel(s.to_string())),
        }
    }
}

/// Returns the unique parent of a subclass.
pub fn parent_of(sub: Level2Label) -> Level1Label {
    sub.parent()
}

/// Either level of the ontology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Level1(Level1Label),
    Level2(Level2Label),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Level1(l) => l.fmt(f),
            Label::Level2(l) => l.fmt(f),
        }
    }
}

fn lookup_table() -> &'static HashMap<String, Label> {
    static TABLE: OnceLock<HashMap<String, Label>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = HashMap::new();
        for l in Level1Label::ALL {
            for key in [l.as_str(), l.short_code()] {
                table.insert(key.to_lowercase(), Label::Level1(l));
            }
        }
        for info in &SUBCLASSES {
            let keys = [info.prompt_name, info.short_code, info.display_name]
                .into_iter()
                .chain(info.aliases.iter().copied());
            for key in keys {
                table.insert(key.to_lowercase(), Label::Level2(info.label));
            }
        }
        table
    })
}

/// Resolves a label spelling at either level.
///
/// Matching is case-insensitive over identifiers, short codes, display names
/// and aliases. Surrounding whitespace is ignored.
pub fn resolve_label(text: &str) -> Result<Label, OntologyError> {
    let key = text.trim();
    if key.is_empty() {
        return Err(OntologyError::UnknownLabel(text.to_string()));
    }
    lookup_table()
        .get(&key.to_lowercase())
        .copied()
        .ok_or_else(|| OntologyError::UnknownLabel(text.to_string()))
}

/// The subclasses offered to the classifier for one parent, in prompt order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingSet {
    parent: Level1Label,
    tags: &'static [Level2Label],
}

impl RoutingSet {
    pub fn parent(&self) -> Level1Label {
        self.parent
    }

    pub fn labels(&self) -> &'static [Level2Label] {
        self.tags
    }

    /// Prompt spellings in prompt order.
    pub fn allowed_prompt_tags(&self) -> Vec<&'static str> {
        self.tags.iter().map(|t| t.prompt_name()).collect()
    }

    pub fn contains(&self, label: Level2Label) -> bool {
        self.tags.contains(&label)
    }

    /// Case-insensitive lookup of a tag spelling among the allowed prompt tags.
    pub fn match_tag(&self, text: &str) -> Option<Level2Label> {
        let text = text.trim();
        self.tags
            .iter()
            .copied()
            .find(|t| t.prompt_name().eq_ignore_ascii_case(text))
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

// Case and Treaty are valid subclasses but never offered to the classifier.
pub fn routing_set(parent: Level1Label) -> RoutingSet {
    use Level2Label::*;
    let tags: &'static [Level2Label] = match parent {
        Level1Label::Abstraction => &[
            Doctrine,
            Fund,
            Infrastructure,
            Misc,
            Program,
            Session,
            Specification,
            System,
        ],
        Level1Label::Act => &[Amendment, PublicAct],
        Level1Label::Class => &[NonProtectedClass, ProtectedClass],
        Level1Label::Document => &[Bill, Code, Parenthetical, Reference, Report],
        Level1Label::Organization => &[
            Agency,
            Association,
            Committee,
            InternationalInstitution,
            LegislativeBody,
            Locality,
            Nation,
            State,
        ],
        Level1Label::Person => &[Member, Name, Title],
    };
    RoutingSet { parent, tags }
}

/// The full ontology as a JSON value. Object keys are sorted, so the
/// serialized form is deterministic.
pub fn ontology_json() -> Value {
    let level1: Vec<Value> = Level1Label::ALL
        .iter()
        .map(|l| {
            json!({
                "id": l.as_str(),
                "short_code": l.short_code(),
                "subclasses": l.children().map(|c| c.as_str()).collect::<Vec<_>>(),
                "routing": l.routing_set().allowed_prompt_tags(),
            })
        })
        .collect();
    let level2: Vec<Value> = Level2Label::ALL
        .iter()
        .map(|s| {
            json!({
                "id": s.as_str(),
                "parent": s.parent().as_str(),
                "prompt_name": s.prompt_name(),
                "short_code": s.short_code(),
                "display_name": s.display_name(),
                "aliases": s.aliases(),
                "routable": s.is_routable(),
            })
        })
        .collect();
    let routing: BTreeMap<&str, Vec<&str>> = Level1Label::ALL
        .iter()
        .map(|l| (l.as_str(), l.routing_set().allowed_prompt_tags()))
        .collect();
    json!({ "level1": level1, "level2": level2, "routing": routing })
}

/// Pretty-printed [`ontology_json`].
pub fn ontology_json_string() -> String {
    serde_json::to_string_pretty(&ontology_json()).expect("ontology serializes")
}
