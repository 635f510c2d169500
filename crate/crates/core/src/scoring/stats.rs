use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::{extract_spans, Level, ScoreOptions};
use crate::corpus::SplitManifest;
use crate::ontology::{Level1Label, Level2Label};

/// Size and mention statistics for one split.
///
/// Unique mentions are distinct `(surface form, level-one label)` pairs; the
/// count of distinct surface forms alone is reported alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub split: String,
    pub bills: u64,
    pub tokens: u64,
    pub total_mentions: u64,
    pub unique_mentions: u64,
    pub unique_surface_forms: u64,
    pub min_tokens: u64,
    pub max_tokens: u64,
    pub mean_tokens: f64,
    pub level1: BTreeMap<Level1Label, u64>,
    pub level2: BTreeMap<Level2Label, u64>,
    /// Level-two mentions written as unresolved or with an unknown subclass.
    pub level2_unresolved: u64,
}

/// Statistics for a split. Layers are read as BIO with conll repair.
pub fn stats(split: &SplitManifest) -> DatasetStats {
    let opts = ScoreOptions::default();
    let mut level1: BTreeMap<Level1Label, u64> = Level1Label::ALL.iter().map(|l| (*l, 0)).collect();
    let mut level2: BTreeMap<Level2Label, u64> = Level2Label::ALL.iter().map(|l| (*l, 0)).collect();
    let mut level2_unresolved = 0;
    let mut unique: HashSet<(String, Level1Label)> = HashSet::new();
    let mut surfaces: HashSet<String> = HashSet::new();
    let mut total = 0;

    for doc in &split.documents {
        if doc.level1().is_some() {
            let spans = extract_spans(doc, Level::One, &opts).expect("repaired layers decode");
            for s in spans {
                let label: Level1Label = s.label.parse().expect("canonical label");
                *level1.entry(label).or_default() += 1;
                let surface = doc.text(s.start, s.end);
                surfaces.insert(surface.clone());
                unique.insert((surface, label));
                total += 1;
            }
        }
        if doc.level2().is_some() {
            let spans = extract_spans(doc, Level::Two, &opts).expect("repaired layers decode");
            for s in spans {
                match s.label.parse::<Level2Label>() {
                    Ok(l) => *level2.entry(l).or_default() += 1,
                    Err(_) => level2_unresolved += 1,
                }
            }
        }
    }

    let lengths: Vec<u64> = split.documents.iter().map(|d| d.len() as u64).collect();
    let tokens: u64 = lengths.iter().sum();
    let bills = lengths.len() as u64;
    DatasetStats {
        split: split.name.to_string(),
        bills,
        tokens,
        total_mentions: total,
        unique_mentions: unique.len() as u64,
        unique_surface_forms: surfaces.len() as u64,
        min_tokens: lengths.iter().copied().min().unwrap_or(0),
        max_tokens: lengths.iter().copied().max().unwrap_or(0),
        mean_tokens: if bills == 0 { 0.0 } else { tokens as f64 / bills as f64 },
        level1,
        level2,
        level2_unresolved,
    }
}

impl DatasetStats {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "split {}", self.split).unwrap();
        let rows: [(&str, String); 7] = [
            ("Bills", self.bills.to_string()),
            ("Tokens", self.tokens.to_string()),
            ("Unique Mentions", self.unique_mentions.to_string()),
            ("Total Mentions", self.total_mentions.to_string()),
            ("Unique Surface Forms", self.unique_surface_forms.to_string()),
            (
                "Tokens per Bill (min/mean/max)",
                format!("{}/{:.0}/{}", self.min_tokens, self.mean_tokens, self.max_tokens),
            ),
            ("Unresolved Level-2", self.level2_unresolved.to_string()),
        ];
        for (name, v) in rows {
            writeln!(out, "{name:<32}{v:>12}").unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "{:<32}{:>12}", "Type", "Mentions").unwrap();
        for l1 in Level1Label::ALL {
            writeln!(out, "{:<32}{:>12}", l1.as_str(), self.level1[&l1]).unwrap();
            for l2 in l1.children() {
                writeln!(out, "  {:<30}{:>12}", l2.display_name(), self.level2[&l2]).unwrap();
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}
