//! BIO and IO tag sequences.
//!
//! Tags are `O`, `B-<label>` or `I-<label>`. Level-one layers use class names
//! (`B-Organization`), level-two layers use subclass prompt names
//! (`B-LegislativeBody`) plus the [`UNRESOLVED`] sentinel written when the
//! sublabel classifier gives no usable answer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::SeqLabelError;
use crate::ontology::{resolve_label, Label, Level1Label, Level2Label};

/// Sublabel written for spans the classifier could not resolve.
pub const UNRESOLVED: &str = "UNRESOLVED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Bio,
    Io,
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bio" | "iob2" => Ok(Scheme::Bio),
            "io" => Ok(Scheme::Io),
            _ => Err(format!("unknown scheme {s:?} (expected bio or io)")),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Bio => "bio",
            Scheme::Io => "io",
        })
    }
}

/// Which vocabulary a tag layer draws its labels from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    Level1,
    Level2,
}

impl Layer {
    /// Canonical spelling of `label` in this layer, if it is known.
    pub fn canonical(self, label: &str) -> Option<&'static str> {
        if self == Layer::Level2 && label == UNRESOLVED {
            return Some(UNRESOLVED);
        }
        match (self, resolve_label(label).ok()?) {
            (Layer::Level1, Label::Level1(l)) => Some(l.as_str()),
            (Layer::Level2, Label::Level2(l)) => Some(l.prompt_name()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

fn parse_tag(tag: &str) -> Option<Tag<'_>> {
    if tag == "O" {
        return Some(Tag::Outside);
    }
    let (prefix, label) = tag.split_once('-')?;
    if label.is_empty() {
        return None;
    }
    match prefix {
        "B" => Some(Tag::Begin(label)),
        "I" => Some(Tag::Inside(label)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagSequence {
    pub scheme: Scheme,
    pub tags: Vec<String>,
}

impl TagSequence {
    pub fn new(scheme: Scheme, tags: Vec<String>) -> Self {
        TagSequence { scheme, tags }
    }

    pub fn from_strs(scheme: Scheme, tags: &[&str]) -> Self {
        TagSequence::new(scheme, tags.iter().map(|s| s.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// IO view of this sequence: every `B-` becomes `I-`.
    pub fn to_io(&self) -> TagSequence {
        let tags = self
            .tags
            .iter()
            .map(|t| match t.strip_prefix("B-") {
                Some(rest) => format!("I-{rest}"),
                None => t.clone(),
            })
            .collect();
        TagSequence::new(Scheme::Io, tags)
    }
}

/// An untyped labelled span `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

impl Span {
    pub fn new(start: usize, end: usize, label: impl Into<String>) -> Self {
        Span {
            start,
            end,
            label: label.into(),
        }
    }
}

/// A typed mention `[start, end)` with an optional subclass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
    pub level1: Level1Label,
    pub level2: Option<Level2Label>,
}

impl Mention {
    pub fn new(start: usize, end: usize, level1: Level1Label) -> Self {
        Mention {
            start,
            end,
            level1,
            level2: None,
        }
    }

    pub fn with_level2(mut self, sub: Level2Label) -> Result<Self, SeqLabelError> {
        if sub.parent() != self.level1 {
            return Err(SeqLabelError::ParentMismatch {
                sub: sub.to_string(),
                parent: self.level1.to_string(),
            });
        }
        self.level2 = Some(sub);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Not `O`, `B-X` or `I-X`.
    MalformedTag,
    UnknownLabel,
    /// `I-X` not preceded by `B-X` or `I-X` under BIO.
    InvalidContinuation,
    /// A `B-` prefix under IO.
    BeginInIo,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::MalformedTag => "malformed tag",
            ViolationKind::UnknownLabel => "unknown label",
            ViolationKind::InvalidContinuation => "invalid continuation",
            ViolationKind::BeginInIo => "B- prefix in IO sequence",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
    pub tag: String,
}

fn same_label(layer: Layer, a: &str, b: &str) -> bool {
    match (layer.canonical(a), layer.canonical(b)) {
        (Some(x), Some(y)) => x == y,
        _ => a == b,
    }
}

fn continues(layer: Layer, prev: Option<Tag<'_>>, label: &str) -> bool {
    match prev {
        Some(Tag::Begin(p)) | Some(Tag::Inside(p)) => same_label(layer, p, label),
        _ => false,
    }
}

fn check_tag(seq_scheme: Scheme, layer: Layer, prev: Option<&str>, tag: &str) -> Option<ViolationKind> {
    let Some(parsed) = parse_tag(tag) else {
        return Some(ViolationKind::MalformedTag);
    };
    match parsed {
        Tag::Outside => None,
        Tag::Begin(label) | Tag::Inside(label) if layer.canonical(label).is_none() => {
            Some(ViolationKind::UnknownLabel)
        }
        Tag::Begin(_) if seq_scheme == Scheme::Io => Some(ViolationKind::BeginInIo),
        Tag::Begin(_) => None,
        Tag::Inside(label) => {
            let ok = seq_scheme == Scheme::Io || continues(layer, prev.and_then(parse_tag), label);
            (!ok).then_some(ViolationKind::InvalidContinuation)
        }
    }
}

/// Reports every ill-formed position of `seq`.
pub fn validate(seq: &TagSequence, layer: Layer) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, tag) in seq.tags.iter().enumerate() {
        let prev = i.checked_sub(1).map(|p| seq.tags[p].as_str());
        if let Some(kind) = check_tag(seq.scheme, layer, prev, tag) {
            out.push(Violation {
                index: i,
                kind,
                tag: tag.clone(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairPolicy {
    /// An invalid `I-X` starts a new entity (`B-X`); under IO a `B-X` becomes `I-X`.
    #[default]
    Conll,
    /// Every token of an ill-formed entity becomes `O`.
    Discard,
}

impl FromStr for RepairPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "conll" | "conlleval" => Ok(RepairPolicy::Conll),
            "discard" => Ok(RepairPolicy::Discard),
            _ => Err(format!("unknown repair policy {s:?} (expected conll or discard)")),
        }
    }
}

impl fmt::Display for RepairPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepairPolicy::Conll => "conll",
            RepairPolicy::Discard => "discard",
        })
    }
}

/// Rewrites `seq` so that it validates cleanly. Tags with malformed shape or
/// unknown labels become `O` under either policy. Valid sequences are
/// returned unchanged.
pub fn repair(seq: &TagSequence, policy: RepairPolicy, layer: Layer) -> TagSequence {
    let mut out: Vec<String> = Vec::with_capacity(seq.len());
    // label of an ill-formed entity whose remaining tokens are being dropped
    let mut dropping: Option<String> = None;
    for tag in &seq.tags {
        let prev = out.last().map(String::as_str);
        let fixed = match check_tag(seq.scheme, layer, prev, tag) {
            None => {
                let continues_dropped = match (&dropping, parse_tag(tag)) {
                    (Some(d), Some(Tag::Inside(label))) => same_label(layer, d, label),
                    _ => false,
                };
                if continues_dropped {
                    "O".to_string()
                } else {
                    dropping = None;
                    tag.clone()
                }
            }
            Some(ViolationKind::MalformedTag | ViolationKind::UnknownLabel) => {
                dropping = None;
                "O".to_string()
            }
            Some(kind) => {
                let label = tag[2..].to_string();
                match policy {
                    RepairPolicy::Conll => {
                        dropping = None;
                        let prefix = if kind == ViolationKind::BeginInIo { "I-" } else { "B-" };
                        format!("{prefix}{label}")
                    }
                    RepairPolicy::Discard => {
                        dropping = Some(label);
                        "O".to_string()
                    }
                }
            }
        };
        out.push(fixed);
    }
    TagSequence::new(seq.scheme, out)
}

fn check_spans(spans: &mut [Span], len: usize) -> Result<(), SeqLabelError> {
    spans.sort_by_key(|s| (s.start, s.end));
    let mut cursor = 0;
    for s in spans.iter() {
        if s.start >= s.end || s.end > len {
            return Err(SeqLabelError::OutOfRange {
                start: s.start,
                end: s.end,
                len,
            });
        }
        if s.start < cursor {
            return Err(SeqLabelError::Overlap(s.start));
        }
        cursor = s.end;
    }
    Ok(())
}

/// Encodes labelled spans as a tag sequence of length `len`.
pub fn encode_spans(spans: &[Span], len: usize, scheme: Scheme) -> Result<TagSequence, SeqLabelError> {
    let mut spans = spans.to_vec();
    check_spans(&mut spans, len)?;
    let mut tags = vec!["O".to_string(); len];
    for s in &spans {
        for (i, tag) in tags[s.start..s.end].iter_mut().enumerate() {
            let prefix = if i == 0 && scheme == Scheme::Bio { "B" } else { "I" };
            *tag = format!("{prefix}-{}", s.label);
        }
    }
    Ok(TagSequence::new(scheme, tags))
}

/// Encodes the level-one labels of `mentions`.
pub fn encode(mentions: &[Mention], len: usize, scheme: Scheme) -> Result<TagSequence, SeqLabelError> {
    let spans: Vec<Span> = mentions
        .iter()
        .map(|m| Span::new(m.start, m.end, m.level1.as_str()))
        .collect();
    encode_spans(&spans, len, scheme)
}

/// Encodes the level-two labels of `mentions`; mentions without a subclass
/// are written as [`UNRESOLVED`].
pub fn encode_level2(mentions: &[Mention], len: usize, scheme: Scheme) -> Result<TagSequence, SeqLabelError> {
    let spans: Vec<Span> = mentions
        .iter()
        .map(|m| Span::new(m.start, m.end, m.level2.map_or(UNRESOLVED, |l| l.prompt_name())))
        .collect();
    encode_spans(&spans, len, scheme)
}

/// Spans of a sequence, without checking it first. Under BIO an `I-` that
/// does not continue the open span starts a new one; under IO a change of
/// label closes the span. Labels are returned as written.
pub(crate) fn chunks(seq: &TagSequence, layer: Layer) -> Vec<Span> {
    let mut out: Vec<Span> = Vec::new();
    let mut open: Option<Span> = None;
    for (i, tag) in seq.tags.iter().enumerate() {
        let parsed = parse_tag(tag).unwrap_or(Tag::Outside);
        let continue_open = match (&open, parsed) {
            (Some(o), Tag::Inside(label)) => same_label(layer, &o.label, label),
            (Some(o), Tag::Begin(label)) => seq.scheme == Scheme::Io && same_label(layer, &o.label, label),
            _ => false,
        };
        if continue_open {
            if let Some(o) = open.as_mut() {
                o.end = i + 1;
            }
            continue;
        }
        out.extend(open.take());
        open = match parsed {
            Tag::Begin(label) | Tag::Inside(label) => Some(Span::new(i, i + 1, label)),
            Tag::Outside => None,
        };
    }
    out.extend(open);
    out
}

/// Decodes a valid sequence into spans with canonical label spellings.
pub fn decode_spans(seq: &TagSequence, layer: Layer) -> Result<Vec<Span>, SeqLabelError> {
    let violations = validate(seq, layer);
    if !violations.is_empty() {
        return Err(SeqLabelError::InvalidSequence(violations.len()));
    }
    Ok(chunks(seq, layer)
        .into_iter()
        .map(|mut s| {
            s.label = layer.canonical(&s.label).expect("validated").to_string();
            s
        })
        .collect())
}

/// Decodes a valid level-one sequence into mentions.
pub fn decode(seq: &TagSequence) -> Result<Vec<Mention>, SeqLabelError> {
    Ok(decode_spans(seq, Layer::Level1)?
        .into_iter()
        .map(|s| Mention::new(s.start, s.end, s.label.parse().expect("canonical level-one label")))
        .collect())
}

/// Decodes a sequence after repairing it with `policy`.
pub fn decode_repaired(seq: &TagSequence, policy: RepairPolicy) -> Vec<Mention> {
    decode(&repair(seq, policy, Layer::Level1)).expect("repaired sequences validate")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerViolationKind {
    LengthMismatch,
    /// The B/I/O prefixes of the two layers differ.
    SkeletonMismatch,
    /// The subclass does not belong to the class at the same position.
    ParentMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerViolation {
    pub index: usize,
    pub kind: LayerViolationKind,
}

fn prefix(tag: &str) -> Option<char> {
    match parse_tag(tag)? {
        Tag::Outside => Some('O'),
        Tag::Begin(_) => Some('B'),
        Tag::Inside(_) => Some('I'),
    }
}

/// Checks that a level-two layer follows the span skeleton of its level-one
/// layer and that each subclass belongs to the class it refines.
pub fn check_layers(level1: &TagSequence, level2: &TagSequence) -> Vec<LayerViolation> {
    if level1.len() != level2.len() {
        return vec![LayerViolation {
            index: level1.len().min(level2.len()),
            kind: LayerViolationKind::LengthMismatch,
        }];
    }
    let mut out = Vec::new();
    for (i, (a, b)) in level1.tags.iter().zip(&level2.tags).enumerate() {
        if prefix(a) != prefix(b) {
            out.push(LayerViolation {
                index: i,
                kind: LayerViolationKind::SkeletonMismatch,
            });
            continue;
        }
        let (Some(Tag::Begin(l1) | Tag::Inside(l1)), Some(Tag::Begin(l2) | Tag::Inside(l2))) =
            (parse_tag(a), parse_tag(b))
        else {
            continue;
        };
        if l2 == UNRESOLVED {
            continue;
        }
        let parent = match (resolve_label(l1), resolve_label(l2)) {
            (Ok(Label::Level1(p)), Ok(Label::Level2(s))) => s.parent() == p,
            _ => false,
        };
        if !parent {
            out.push(LayerViolation {
                index: i,
                kind: LayerViolationKind::ParentMismatch,
            });
        }
    }
    out
}
